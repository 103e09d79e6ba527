// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace awarp {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Format,
  Degenerate,
  NoCrossing,
  Singular,
  OutOfRange,
};

/// Single exception type for the core library; `kind()` drives the C API
/// error code and the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace awarp
