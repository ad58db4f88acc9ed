#include "liesect/error.hpp"

#include <utility>

namespace liesect {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "config";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Precondition: return "precondition";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error(ErrorKind::Parse, message + " at offset " + std::to_string(offset)),
      offset_(offset),
      detail_(message) {}

DomainError::DomainError(Span span, const std::string& message)
    : Error(ErrorKind::Domain, message + " at [" + std::to_string(span.begin) +
                                   "," + std::to_string(span.end) + ")"),
      span_(span) {}

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : Error(ErrorKind::Config,
            key_path.empty() ? message : key_path + ": " + message),
      key_path_(std::move(key_path)) {}

}  // namespace liesect
