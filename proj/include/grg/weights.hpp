#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace grg {

// ---------------------------------------------------------------------------
// Weight laws

/// Every vertex gets the same weight n*lambda/(n - lambda), which turns the
/// generalized random graph into G(n, lambda/n). The value depends on n, so it
/// is resolved when sampling.
struct ConstantWeights {
  double lambda;
};

struct ExponentialWeights {
  double rate;
};

struct LogNormalWeights {
  double mu;
  double sigma;
};

struct GammaWeights {
  double shape;
  double scale;
};

/// P(W > x) = (xm / x)^alpha for x >= xm.
struct ParetoWeights {
  double alpha;
  double xm;
};

/// P(W > x) = (x / xm)^-alpha * (1 + log(x / xm)) for x >= xm. A Pareto tail
/// with a logarithmic slowly varying factor. Needs alpha >= 1 to be a valid
/// survival function.
struct ParetoLogWeights {
  double alpha;
  double xm;
};

using WeightModel = std::variant<ConstantWeights, ExponentialWeights, LogNormalWeights,
                                 GammaWeights, ParetoWeights, ParetoLogWeights>;

/// Throws kParameterDomain if any parameter is outside its domain.
void validate(const WeightModel& model);

std::string model_name(const WeightModel& model);

/// The per-vertex value of a Constant model at n vertices.
double constant_weight(double lambda, std::size_t n);

// ---------------------------------------------------------------------------
// Realized weights

/// W_1..W_n with the total weight L_n and the sum of squares cached.
class WeightVector {
 public:
  WeightVector() = default;
  /// Throws kParameterDomain if any value is negative or non-finite.
  explicit WeightVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double sum() const { return sum_; }         // L_n
  double sum_sq() const { return sum_sq_; }   // sum of W_i^2

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

/// n i.i.d. draws; deterministic in (model, n, seed).
WeightVector sample_weights(const WeightModel& model, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Moments and tails

struct Moments {
  double mean;       // EW
  double variance;   // Var W, +inf when EW^2 is infinite
  double second;     // EW^2, possibly +inf

  bool finite_variance() const;
};

/// Closed-form moments. A Constant model needs the vertex count `n` to
/// resolve its weight; other models ignore it.
Moments analytic_moments(const WeightModel& model, std::optional<std::size_t> n = std::nullopt);

/// Density of W. Constant models have none and throw kUnsupportedModel.
double density(const WeightModel& model, double x);

/// P(W > x).
double survival(const WeightModel& model, double x);

/// Left end of the support (the infimum of possible weights).
double support_min(const WeightModel& model);

/// E W^2 I(W <= x). Closed form for Pareto, adaptive Gauss-Kronrod otherwise.
double truncated_second_moment(const WeightModel& model, double x);

/// E W I(W >= x). Closed form for Pareto, adaptive Gauss-Kronrod otherwise.
double truncated_first_moment_tail(const WeightModel& model, double x);

enum class SlowlyVarying { kConstant, kLogarithmic };

/// Regular-variation data P(W > x) ~ c x^-alpha h(x).
struct TailParams {
  double alpha;
  double c;
  SlowlyVarying h_kind;
  double xm;  // reference point of the logarithmic factor

  double h(double x) const;
};

/// Tail data for heavy-tailed (Pareto family) models, nullopt otherwise.
std::optional<TailParams> tail_params(const WeightModel& model);

struct Lemma1Ratios {
  double x;
  double second_moment;     // E W^2 I(W <= x)
  double tail_moment;       // E W I(W >= x)
  double ratio_second;      // vs c*alpha/(2-alpha) x^(2-alpha) h(x)
  double ratio_tail_karamata;  // vs c*alpha/(alpha-1) x^(1-alpha) h(x)
  double ratio_tail_printed;   // vs c*(2-alpha)/(alpha-1) x^(1-alpha) h(x)
};

/// Exact truncated moments divided by their regular-variation asymptotes.
/// Throws kUnsupportedModel for models without tail data.
std::vector<Lemma1Ratios> lemma1_ratio_check(const WeightModel& model,
                                             std::span<const double> x_grid);

/// The norming a_n: the largest root of a^2 = n E W^2 I(W <= a).
/// Requires a regularly varying tail with alpha in (1, 2).
double compute_norming(const WeightModel& model, std::size_t n);

}  // namespace grg
