#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liesect {

/// Broad failure categories. The CLI maps each one onto an exit code.
enum class ErrorKind {
  Parse,         ///< malformed expression text
  Domain,        ///< expression evaluated outside its domain (log of 0, ...)
  Config,        ///< invalid or inconsistent configuration
  Numerical,     ///< Newton divergence, singular systems, left the chart
  Precondition,  ///< inputs violate an operation's stated precondition
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Half-open byte range [begin, end) into an expression's source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  /// Message without the "at offset N" suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

class DomainError : public Error {
 public:
  DomainError(Span span, const std::string& message);

  Span span() const noexcept { return span_; }

 private:
  Span span_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message);

  /// JSON key path of the offending entry, e.g. "frame[0]".
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::Numerical, message) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error(ErrorKind::Precondition, message) {}
};

}  // namespace liesect
