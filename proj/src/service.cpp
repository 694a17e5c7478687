#include "dtreason/service.hpp"

#include <charconv>
#include <thread>

#include "httplib.h"

#include "dtreason/error.hpp"

namespace dtr {

namespace {

using ojson = nlohmann::ordered_json;

HttpResponse json_response(int status, const ojson& doc) { return {status, doc.dump(), "application/json"}; }

HttpResponse error_response(int status, std::string_view kind, const std::string& message,
                            std::optional<SourcePos> pos = std::nullopt) {
  ojson doc{{"error", kind}, {"message", message}};
  if (pos) {
    doc["line"] = pos->line;
    doc["column"] = pos->column;
  }
  return json_response(status, doc);
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Duplicate: return 409;
    case ErrorKind::Internal: return 500;
    default: return 400;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) out.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

nlohmann::json parse_body(const std::string& body) {
  try {
    return nlohmann::json::parse(body.empty() ? "{}" : body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON body: ") + e.what());
  }
}

std::string string_field(const nlohmann::json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_string()) {
    throw Error(ErrorKind::Validation, std::string("body needs a string field \"") + key + "\"");
  }
  return doc[key].get<std::string>();
}

HttpResponse not_found(const std::string& what) { return error_response(404, "not_found", what); }

}  // namespace

SessionStore::SessionStore(ServiceOptions options) : options_(std::move(options)) {}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t SessionStore::expire(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second.last_used > options_.idle_timeout) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second.last_used = Clock::now();
  return it->second.session;
}

HttpResponse SessionStore::create(const std::string& body) {
  auto doc = parse_body(body);
  const auto& meta = doc.is_object() && doc.contains("metadata") ? doc["metadata"] : doc;
  auto session = std::make_shared<Session>(parse_metadata(meta));
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, Entry{std::move(session), Clock::now()});
  }
  return json_response(201, ojson{{"session_id", id}});
}

HttpResponse SessionStore::handle(const std::string& method, const std::string& path,
                                  const std::string& body) {
  try {
    auto parts = split_path(path);
    if (parts.empty() || parts[0] != "sessions") return not_found("no such resource");
    if (parts.size() == 1) {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      return create(body);
    }
    auto session = find(parts[1]);
    if (!session) return not_found("unknown session '" + parts[1] + "'");
    std::string rest;
    for (std::size_t i = 2; i < parts.size(); ++i) rest += "/" + parts[i];
    return route_session(method, session, parts[1], rest, body);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), error_kind_name(e.kind()), e.detail(), e.pos());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "parse_error", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
}

HttpResponse SessionStore::route_session(const std::string& method,
                                         const std::shared_ptr<Session>& session,
                                         const std::string& id, const std::string& rest,
                                         const std::string& body) {
  if (rest.empty()) {
    if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
    ojson state{{"session_id", id}};
    auto contents = session->state_json();
    for (auto& [k, v] : contents.items()) state[k] = v;
    return json_response(200, state);
  }
  if (rest == "/script" && method == "GET") return {200, session->script(), "text/plain"};
  if (rest == "/models" && method == "POST") {
    return json_response(201, ojson{{"model_id", session->declare_model(parse_body(body))}});
  }
  if (rest == "/instances" && method == "POST") {
    auto doc = parse_body(body);
    Rat minconf;
    if (doc.contains("minconf")) minconf = rat_from_json(doc["minconf"]);
    std::string name = string_field(doc, "name");
    session->declare_instance(name, string_field(doc, "model_id"), string_field(doc, "label"), minconf);
    return json_response(201, ojson{{"name", name}});
  }
  if (rest == "/constraints" && method == "POST") {
    auto doc = parse_body(body);
    auto cid = session->add_constraint(string_field(doc, "text"));
    return json_response(201, ojson{{"constraint_id", cid}});
  }
  if (rest.rfind("/constraints/", 0) == 0 && method == "DELETE") {
    std::string cid = rest.substr(std::string("/constraints/").size());
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(cid.data(), cid.data() + cid.size(), value);
    if (ec != std::errc{} || ptr != cid.data() + cid.size()) return not_found("unknown constraint '" + cid + "'");
    try {
      session->remove_constraint(value);
    } catch (const Error&) {
      return not_found("unknown constraint '" + cid + "'");
    }
    return {204, "", "application/json"};
  }
  if (rest == "/solve" && method == "POST") {
    auto doc = parse_body(body);
    SolveRequest request;
    if (doc.contains("project") && !doc["project"].is_null()) {
      for (const auto& p : doc["project"]) request.project.push_back(p.get<std::string>());
    }
    if (doc.contains("minimize") && !doc["minimize"].is_null()) {
      request.minimize = doc["minimize"].get<std::string>();
    }
    Budget budget = options_.budget_ms ? Budget::for_duration(std::chrono::milliseconds(*options_.budget_ms)) : Budget::unlimited();
    return json_response(200, answer_to_json(session->solveopt(request, budget)));
  }
  return not_found("no such resource");
}

bool serve(const std::string& host, int port, const ServiceOptions& options) {
  SessionStore store(options);
  httplib::Server server;

  auto adapt = [&store, &options](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = store.handle(req.method, req.path, req.body);
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.content_type);
    if (!options.cors_origin.empty()) res.set_header("Access-Control-Allow-Origin", options.cors_origin);
  };
  server.Get(R"(/sessions(/.*)?)", adapt);
  server.Post(R"(/sessions(/.*)?)", adapt);
  server.Delete(R"(/sessions(/.*)?)", adapt);
  server.Options(R"(.*)", [&options](const httplib::Request&, httplib::Response& res) {
    if (!options.cors_origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", options.cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
    res.status = 204;
  });

  std::jthread sweeper([&store](std::stop_token stop) {
    while (!stop.stop_requested()) {
      for (int i = 0; i < 10 && !stop.stop_requested(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
      store.expire();
    }
  });
  return server.listen(host, port);
}

}  // namespace dtr
