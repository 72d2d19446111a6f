#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace grg {

/// Stable law in the classical parametrization:
///   phi(t) = exp(-scale^alpha |t|^alpha (1 - i beta sgn(t) tan(pi alpha / 2)) + i location t)
/// for alpha != 1, and
///   phi(t) = exp(-scale |t| (1 + i beta (2/pi) sgn(t) log|t|) + i location t)
/// for alpha = 1.
struct StableParams {
  double alpha = 2.0;     // (0, 2]
  double beta = 0.0;      // [-1, 1]
  double scale = 1.0;     // > 0
  double location = 0.0;
};

/// Throws kParameterDomain outside the domains above.
void validate(const StableParams& p);

std::complex<double> stable_char_fn(double t, const StableParams& p);

/// CDF by Gil-Pelaez inversion,
///   F(x) = 1/2 - (1/pi) int_0^inf Im[e^{-itx} phi(t)] / t dt,
/// truncated where |phi| < 1e-15 and integrated panel by panel over the
/// oscillation period. Far tails (|z| > 1e3 in standardized units) use the
/// leading power-law term, which is accurate to well below 1e-6 there.
double stable_cdf(double x, const StableParams& p);

/// Chambers-Mallows-Stuck draws; deterministic in seed.
std::vector<double> sample_stable(const StableParams& p, std::size_t m, std::uint64_t seed);

/// stable_cdf tabulated on a sinh-spaced grid, made monotone by a running
/// maximum, and interpolated linearly. Outside the grid it defers to the
/// tail expansion. Meant for KS tests against many sample points.
class StableCdfTable {
 public:
  explicit StableCdfTable(const StableParams& p, std::size_t points = 2001);

  double operator()(double x) const;

 private:
  StableParams params_;
  double shift_ = 0.0;  // standardization: z = (x - shift_) / scale
  double u_max_ = 0.0;
  std::vector<double> values_;
};

}  // namespace grg
