#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dtreason/session.hpp"

namespace dtr {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  std::chrono::seconds idle_timeout{3600};
  std::optional<unsigned> budget_ms = 10000;
  std::string cors_origin;  // empty disables CORS headers
};

/// In-memory session registry and request router, independent of any HTTP
/// library so it can be exercised directly in tests.
class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionStore(ServiceOptions options = {});

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Drops sessions idle for longer than the configured timeout.
  std::size_t expire(Clock::time_point now = Clock::now());
  std::size_t size() const;

 private:
  struct Entry {
    std::shared_ptr<Session> session;
    Clock::time_point last_used;
  };

  std::shared_ptr<Session> find(const std::string& id);
  HttpResponse create(const std::string& body);
  HttpResponse route_session(const std::string& method, const std::shared_ptr<Session>& session,
                             const std::string& id, const std::string& rest, const std::string& body);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> sessions_;
  std::size_t next_id_ = 1;
};

/// Blocks serving HTTP on host:port until the process is stopped.
/// Returns false when the address cannot be bound.
bool serve(const std::string& host, int port, const ServiceOptions& options);

}  // namespace dtr
