#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace grg {

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  double n_effective = 0.0;  // n (one-sample) or nm/(n+m) (two-sample)
};

/// Right-continuous empirical CDF.
class EmpiricalCdf {
 public:
  /// Throws kParameterDomain on an empty sample.
  explicit EmpiricalCdf(std::span<const double> sample);

  double operator()(double x) const;
  std::span<const double> sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::span<const double> sample);

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2),
/// clamped to [0, 1].
double kolmogorov_tail(double lambda);

/// p-value for statistic d at effective size n_eff, with the
/// (sqrt(n) + 0.12 + 0.11/sqrt(n)) small-sample correction.
double ks_p_value(double d, double n_eff);

/// D = sup |F_n - F| evaluated on both sides of every jump. Throws
/// kParameterDomain when `cdf` decreases along the sorted sample.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// D = sup |F_a - F_b|; exactly symmetric in (a, b).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Phi(x) via erfc.
double normal_cdf(double x);

double normal_pdf(double x);

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> sample);

double median(std::vector<double> values);

}  // namespace grg
