#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgsym {

/// Array length or grid mismatch between operands.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Spectrum that does not represent a real-valued function.
struct SymmetryError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Physically meaningless model or datum parameters.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Reference solution with zero norm in a relative error.
struct DegenerateReferenceError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Non-finite coefficient detected while time stepping.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(std::int64_t step)
      : std::runtime_error("non-finite coefficient after step " + std::to_string(step)),
        step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The two reference schemes disagree beyond the configured tolerance.
struct ReferenceCertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kgsym
