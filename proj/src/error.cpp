#include "dtreason/error.hpp"

namespace dtr {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::UnknownName: return "unknown_name";
    case ErrorKind::Nonlinear: return "nonlinear";
    case ErrorKind::Type: return "type_error";
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Validation: return "validation_error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Internal: return "internal_error";
  }
  return "internal_error";
}

namespace {

std::string with_pos(const std::string& message, const std::optional<SourcePos>& pos) {
  if (!pos) return message;
  return "line " + std::to_string(pos->line) + ", column " + std::to_string(pos->column) +
         ": " + message;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<SourcePos> pos)
    : std::runtime_error(with_pos(message, pos)), kind_(kind), pos_(pos), detail_(message) {}

}  // namespace dtr
