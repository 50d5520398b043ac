#include "sdffr/error.hpp"

namespace sdffr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DuplicateNode: return "duplicate node";
    case ErrorKind::UnknownNode: return "unknown node";
    case ErrorKind::SelfLoop: return "self-loop";
    case ErrorKind::DuplicateLink: return "duplicate link";
    case ErrorKind::UnknownLink: return "unknown link";
    case ErrorKind::DuplicateRule: return "duplicate rule";
    case ErrorKind::UnknownFlow: return "unknown flow";
    case ErrorKind::DuplicateFlow: return "duplicate flow";
    case ErrorKind::RegistryMismatch: return "registry mismatch";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::InvalidParams: return "invalid parameters";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace sdffr
