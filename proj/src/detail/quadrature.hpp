#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "grg/error.hpp"

namespace grg::detail {

/// Adaptive 15-point Gauss-Kronrod over [a, b]; either bound may be infinite.
/// Accepts the result when the error estimate is below `abs_tol`, or below
/// `rel_tol * |I|` for integrals whose magnitude makes abs_tol unreachable in
/// double precision. Refinement targets 1e-12 relative: asking for less makes
/// the estimate chase rounding noise and the recursion blow up.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-10) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/15, /*tolerance=*/1e-12, &error);
  if (!std::isfinite(value) || error > std::max(abs_tol, rel_tol * std::abs(value))) {
    throw Error(ErrorKind::kNumericalIntegration,
                "Gauss-Kronrod on [" + std::to_string(a) + ", " + std::to_string(b) +
                    "] stopped with error estimate " + std::to_string(error));
  }
  return value;
}

/// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace grg::detail
