#pragma once

#include <stdexcept>
#include <string>

namespace c2b {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind {
  invalid_input = 2,  // malformed files, bad arguments, contract violations
  numeric = 3,        // degenerate geometry, singular systems
  io = 4,             // filesystem failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) {
  throw Error(ErrorKind::invalid_input, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}
[[noreturn]] inline void fail_io(const std::string& msg) {
  throw Error(ErrorKind::io, msg);
}

}  // namespace c2b
