#pragma once

#include <stdexcept>
#include <string>

namespace crossnet {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  Usage,      // bad configuration or arguments
  Data,       // malformed or inconsistent input data
  Io,         // filesystem failures
  Numerical,  // non-finite values during optimization
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Short machine-readable tag, e.g. "UnknownUser".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string code, const std::string& message) {
  throw Error(kind, std::move(code), message);
}

}  // namespace crossnet
