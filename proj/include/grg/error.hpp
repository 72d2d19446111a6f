#pragma once

#include <stdexcept>
#include <string>

namespace grg {

enum class ErrorKind {
  kParameterDomain,      // invalid model / function parameter
  kConstantWeightDomain, // Constant model resolved with lambda >= n
  kUnsupportedModel,     // operation needs tail data the model lacks
  kHypothesisViolation,  // theorem hypotheses not met by the model
  kConfig,               // malformed experiment configuration
  kSize,                 // input exceeds a documented size cap
  kNumericalIntegration, // quadrature did not converge
  kBracketing,           // root finder could not bracket a root
  kIo,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by user input rather than numerics or I/O.
  bool is_config_error() const noexcept;

 private:
  ErrorKind kind_;
};

}  // namespace grg
