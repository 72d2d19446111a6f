#include "grg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "detail/quadrature.hpp"
#include "grg/error.hpp"

namespace grg {

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample)
    : sorted_(sample.begin(), sample.end()) {
  if (sorted_.empty()) throw Error(ErrorKind::kParameterDomain, "empirical CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(std::span<const double> sample) { return EmpiricalCdf(sample); }

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // The alternating series converges slowly here; use the Jacobi theta
    // dual: 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      s += std::exp(odd * odd * c);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_p_value(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorKind::kParameterDomain, "KS test on an empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  double prev = 0.0;
  // Walk distinct values v: compare F_n(v) with F(v) and F_n(v-) with F(v-).
  // Taking F(v-) one ulp below v keeps step-function references exact and
  // handles ties in lattice-valued samples.
  for (std::size_t i = 0; i < x.size();) {
    const double v = x[i];
    std::size_t j = i;
    while (j < x.size() && x[j] == v) ++j;
    const double left = cdf(std::nextafter(v, -std::numeric_limits<double>::infinity()));
    const double right = cdf(v);
    // Allow rounding-level wobble (e.g. 1 - survival one ulp apart).
    constexpr double kSlack = 1e-12;
    if (std::isnan(left) || std::isnan(right) || left < prev - kSlack || right < left - kSlack) {
      throw Error(ErrorKind::kParameterDomain, "reference CDF decreases on the sample grid");
    }
    prev = std::max(prev, right);
    d = std::max({d, std::abs(static_cast<double>(i) / n - left),
                  std::abs(static_cast<double>(j) / n - right)});
    i = j;
  }
  return KsResult{d, ks_p_value(d, n), n};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::kParameterDomain, "KS test on an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Step through the merged support, consuming all ties at each value so the
  // supremum is taken on the right-continuous ECDFs.
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double n_eff = n * m / (n + m);
  return KsResult{d, ks_p_value(d, n_eff), n_eff};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kParameterDomain, "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Summary summarize(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::kParameterDomain, "summary of an empty sample");
  detail::CompensatedSum sum;
  for (double v : sample) sum.add(v);
  Summary s;
  const double n = static_cast<double>(sample.size());
  s.mean = sum.value() / n;
  detail::CompensatedSum ss;
  for (double v : sample) ss.add((v - s.mean) * (v - s.mean));
  s.variance = sample.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  s.min = *lo;
  s.max = *hi;
  s.median = median(std::vector<double>(sample.begin(), sample.end()));
  return s;
}

}  // namespace grg
