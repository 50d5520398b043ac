#pragma once

#include <stdexcept>
#include <string>

namespace sdffr {

enum class ErrorKind {
  DuplicateNode,
  UnknownNode,
  SelfLoop,
  DuplicateLink,
  UnknownLink,
  DuplicateRule,
  UnknownFlow,
  DuplicateFlow,
  RegistryMismatch,
  Unreachable,
  InvalidParams,
  InvalidArgument,
  Parse,
  Validation,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sdffr
