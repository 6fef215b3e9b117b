// SPDX-License-Identifier: Apache-2.0
//
// Error type shared by every module of the solver core. The C API maps
// ErrorCode one-to-one onto ldc_status.

#pragma once

#include <stdexcept>
#include <string>

namespace ldc {

enum class ErrorCode {
  InvalidArgument,
  Alignment,
  Coefficient,
  Transfer,
  Partition,
  Singular,
  SizeMismatch,
  UnsupportedSpectrum,
  Shift,
  DegeneratePairing,
  Budget,
  Io,
  Shape,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ldc
