#include "grg/error.hpp"

namespace grg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameterDomain: return "parameter-domain error";
    case ErrorKind::kConstantWeightDomain: return "constant-weight domain error";
    case ErrorKind::kUnsupportedModel: return "unsupported-model error";
    case ErrorKind::kHypothesisViolation: return "hypothesis-violation error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kSize: return "size error";
    case ErrorKind::kNumericalIntegration: return "numerical-integration error";
    case ErrorKind::kBracketing: return "bracketing error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

bool Error::is_config_error() const noexcept {
  switch (kind_) {
    case ErrorKind::kNumericalIntegration:
    case ErrorKind::kBracketing:
    case ErrorKind::kIo:
      return false;
    default:
      return true;
  }
}

}  // namespace grg
