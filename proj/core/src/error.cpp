#include "pwhiten/error.hpp"

namespace pwhiten {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::exhausted: return "exhausted";
    case ErrorKind::contract: return "contract";
  }
  return "unknown";
}

}  // namespace pwhiten
