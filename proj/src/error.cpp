// SPDX-License-Identifier: Apache-2.0

#include "ldc/error.hpp"

namespace ldc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Alignment: return "alignment error";
    case ErrorCode::Coefficient: return "coefficient error";
    case ErrorCode::Transfer: return "transfer error";
    case ErrorCode::Partition: return "partition error";
    case ErrorCode::Singular: return "singular matrix";
    case ErrorCode::SizeMismatch: return "size mismatch";
    case ErrorCode::UnsupportedSpectrum: return "unsupported spectrum";
    case ErrorCode::Shift: return "shift error";
    case ErrorCode::DegeneratePairing: return "degenerate pairing";
    case ErrorCode::Budget: return "budget exceeded";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::Shape: return "shape mismatch";
    case ErrorCode::Config: return "configuration error";
  }
  return "unknown error";
}

}  // namespace ldc
