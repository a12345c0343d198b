#pragma once

#include <stdexcept>
#include <string>

namespace gaitrel {

/// Failure categories. The command-line tool maps each one to a fixed exit code.
enum class ErrorKind {
  InvalidInput,  // precondition violated (exit 3)
  Io,            // file missing or unwritable (exit 2)
  Parse,         // malformed CSV/JSON content (exit 4)
  Format,        // unrecognized model file version or schema (exit 4)
  Usage,         // bad command-line flags or tokens (exit 1)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidInput, what);
}

}  // namespace gaitrel
