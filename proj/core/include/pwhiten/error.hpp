#pragma once

#include <stdexcept>
#include <string>

namespace pwhiten {

enum class ErrorKind {
  usage,         // invalid arguments or configuration
  io,            // read/write failure
  format,        // corrupt or unrecognized file contents
  precondition,  // input does not meet an operation's requirements
  exhausted,     // entropy source ran dry
  contract,      // caller violated an API contract (sizes, ranges)
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pwhiten
