#pragma once

#include <stdexcept>
#include <string>

namespace intent {

/// Failure categories. Each maps to a distinct process exit status in the CLI.
enum class ErrorKind {
  Config = 2,
  Data = 3,
  InfeasibleSampling = 4,
  Numerical = 5,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

/// Parse failure that knows where it happened.
class ParseError : public Error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(ErrorKind::Data, source + ":" + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace intent
