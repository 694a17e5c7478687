#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dtr {

enum class ErrorKind {
  Parse,         // malformed text or document
  UnknownName,   // reference to an undeclared instance, feature, model or id
  Nonlinear,     // product of two feature references
  Type,          // nominal feature used in a numeric context or vice versa
  Domain,        // value outside a feature's domain
  Duplicate,     // name declared twice
  Validation,    // any other precondition failure on user input
  Unsupported,   // well-formed request the engine does not handle
  Internal,
};

/// Machine-readable identifier for an error kind ("parse_error", ...).
std::string_view error_kind_name(ErrorKind kind);

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<SourcePos> pos = std::nullopt);

  ErrorKind kind() const { return kind_; }
  const std::optional<SourcePos>& pos() const { return pos_; }
  /// Message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::optional<SourcePos> pos_;
  std::string detail_;
};

}  // namespace dtr
