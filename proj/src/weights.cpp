#include "grg/weights.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "detail/quadrature.hpp"
#include "grg/error.hpp"
#include "grg/rng.hpp"

namespace grg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kParameterDomain, what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Survival of ParetoLog in the log coordinate v = log(x / xm).
double pareto_log_survival_v(double alpha, double v) {
  return std::exp(-alpha * v) * (1.0 + v);
}

// Solves exp(-alpha v)(1 + v) = u for v >= 0 by bisection.
double pareto_log_inverse_v(double alpha, double u) {
  double lo = 0.0;
  double hi = 1.0;
  while (pareto_log_survival_v(alpha, hi) > u) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pareto_log_survival_v(alpha, mid) > u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lognormal_density(double mu, double sigma, double x) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gamma_density(double shape, double scale, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return shape < 1.0 ? kInf : (shape == 1.0 ? 1.0 / scale : 0.0);
  return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                  shape * std::log(scale));
}

// Integrates f over [lo, hi] piecewise on the sorted breakpoints. Fixed panel
// edges keep large finite ranges from hiding the mass near the mode and make
// the result non-decreasing as hi grows.
template <class F>
double integrate_panels(F&& f, double lo, double hi, const std::vector<double>& breaks) {
  double total = 0.0;
  double left = lo;
  for (double b : breaks) {
    if (b <= left) continue;
    if (b >= hi) break;
    total += detail::integrate(f, left, b);
    left = b;
  }
  if (hi > left) total += detail::integrate(f, left, hi);
  return total;
}

std::vector<double> geometric_breaks(double first, double stop) {
  std::vector<double> out;
  for (double b = first; b < stop; b *= 2.0) out.push_back(b);
  out.push_back(stop);
  return out;
}

// E W^k restricted to [lo, hi] via quadrature, for the models without a
// closed form. ParetoLog and LogNormal are integrated in log space where their
// integrands are smooth over many decades.
double partial_moment(const WeightModel& model, int k, double lo, double hi) {
  return std::visit(
      Overloaded{
          [&](const ExponentialWeights& m) {
            const double scale = 1.0 / m.rate;
            return integrate_panels(
                [&](double w) { return std::pow(w, k) * m.rate * std::exp(-m.rate * w); }, lo, hi,
                geometric_breaks(scale / 8.0, scale * 1000.0));
          },
          [&](const GammaWeights& m) {
            return integrate_panels(
                [&](double w) { return std::pow(w, k) * gamma_density(m.shape, m.scale, w); }, lo, hi,
                geometric_breaks(m.scale / 8.0, m.scale * (m.shape + 1000.0)));
          },
          [&](const LogNormalWeights& m) {
            const double ylo = lo <= 0.0 ? -kInf : std::log(lo);
            const double yhi = std::isinf(hi) ? kInf : std::log(hi);
            // Panels one sigma wide around the mode of y -> e^{ky} phi(y).
            const double mode = m.mu + k * m.sigma * m.sigma;
            std::vector<double> breaks;
            for (int j = -40; j <= 40; ++j) breaks.push_back(mode + j * m.sigma);
            return integrate_panels(
                [&](double y) {
                  const double z = (y - m.mu) / m.sigma;
                  return std::exp(k * y - 0.5 * z * z) / (m.sigma * std::sqrt(2.0 * std::numbers::pi));
                },
                ylo, yhi, breaks);
          },
          [&](const ParetoLogWeights& m) {
            const double vlo = std::max(0.0, std::log(std::max(lo, m.xm) / m.xm));
            const double vhi = std::isinf(hi) ? kInf : std::log(hi / m.xm);
            if (vhi <= vlo) return 0.0;
            // w^k f(w) dw with w = xm e^v.
            return std::pow(m.xm, k) *
                   integrate_panels(
                       [&](double v) {
                         return std::exp((k - m.alpha) * v) * (m.alpha * (1.0 + v) - 1.0);
                       },
                       vlo, vhi, geometric_breaks(0.5, 1024.0));
          },
          [&](const auto&) -> double {
            throw Error(ErrorKind::kUnsupportedModel, "no density for " + model_name(model));
          },
      },
      model);
}

}  // namespace

void validate(const WeightModel& model) {
  std::visit(Overloaded{
                 [](const ConstantWeights& m) { require(positive(m.lambda), "constant: lambda must be > 0"); },
                 [](const ExponentialWeights& m) { require(positive(m.rate), "exponential: rate must be > 0"); },
                 [](const LogNormalWeights& m) {
                   require(std::isfinite(m.mu), "lognormal: mu must be finite");
                   require(positive(m.sigma), "lognormal: sigma must be > 0");
                 },
                 [](const GammaWeights& m) {
                   require(positive(m.shape), "gamma: shape must be > 0");
                   require(positive(m.scale), "gamma: scale must be > 0");
                 },
                 [](const ParetoWeights& m) {
                   require(positive(m.alpha), "pareto: alpha must be > 0");
                   require(positive(m.xm), "pareto: xm must be > 0");
                 },
                 [](const ParetoLogWeights& m) {
                   require(std::isfinite(m.alpha) && m.alpha >= 1.0, "paretolog: alpha must be >= 1");
                   require(positive(m.xm), "paretolog: xm must be > 0");
                 },
             },
             model);
}

std::string model_name(const WeightModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantWeights& m) { os << "constant:lambda=" << m.lambda; },
                 [&](const ExponentialWeights& m) { os << "exponential:rate=" << m.rate; },
                 [&](const LogNormalWeights& m) { os << "lognormal:mu=" << m.mu << ",sigma=" << m.sigma; },
                 [&](const GammaWeights& m) { os << "gamma:shape=" << m.shape << ",scale=" << m.scale; },
                 [&](const ParetoWeights& m) { os << "pareto:alpha=" << m.alpha << ",xm=" << m.xm; },
                 [&](const ParetoLogWeights& m) { os << "paretolog:alpha=" << m.alpha << ",xm=" << m.xm; },
             },
             model);
  return os.str();
}

double constant_weight(double lambda, std::size_t n) {
  const double nd = static_cast<double>(n);
  if (!(lambda < nd)) {
    throw Error(ErrorKind::kConstantWeightDomain,
                "lambda = " + std::to_string(lambda) + " must be below n = " + std::to_string(n));
  }
  return nd * lambda / (nd - lambda);
}

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
  detail::CompensatedSum sum, sum_sq;
  for (double w : values_) {
    if (!(std::isfinite(w) && w > 0.0)) {
      throw Error(ErrorKind::kParameterDomain, "weights must be positive and finite");
    }
    sum.add(w);
    sum_sq.add(w * w);
  }
  sum_ = sum.value();
  sum_sq_ = sum_sq.value();
}

WeightVector sample_weights(const WeightModel& model, std::size_t n, std::uint64_t seed) {
  validate(model);
  if (n < 2) throw Error(ErrorKind::kParameterDomain, "need at least 2 vertices");
  std::vector<double> values(n);
  Rng rng(seed);
  std::visit(Overloaded{
                 [&](const ConstantWeights& m) {
                   std::fill(values.begin(), values.end(), constant_weight(m.lambda, n));
                 },
                 [&](const ExponentialWeights& m) {
                   for (double& w : values) w = rng.exponential() / m.rate;
                 },
                 [&](const LogNormalWeights& m) {
                   for (double& w : values) w = std::exp(m.mu + m.sigma * rng.normal());
                 },
                 [&](const GammaWeights& m) {
                   for (double& w : values) w = m.scale * rng.gamma(m.shape);
                 },
                 [&](const ParetoWeights& m) {
                   for (double& w : values) w = m.xm * std::pow(rng.uniform_open(), -1.0 / m.alpha);
                 },
                 [&](const ParetoLogWeights& m) {
                   for (double& w : values) {
                     w = m.xm * std::exp(pareto_log_inverse_v(m.alpha, rng.uniform_open()));
                   }
                 },
             },
             model);
  return WeightVector(std::move(values));
}

bool Moments::finite_variance() const { return std::isfinite(variance); }

Moments analytic_moments(const WeightModel& model, std::optional<std::size_t> n) {
  validate(model);
  auto from_mean_second = [](double mean, double second) {
    return Moments{mean, std::isfinite(second) ? second - mean * mean : kInf, second};
  };
  return std::visit(
      Overloaded{
          [&](const ConstantWeights& m) {
            if (!n) {
              throw Error(ErrorKind::kParameterDomain, "constant model needs n to resolve its weight");
            }
            const double w = constant_weight(m.lambda, *n);
            return Moments{w, 0.0, w * w};
          },
          [](const ExponentialWeights& m) {
            return Moments{1.0 / m.rate, 1.0 / (m.rate * m.rate), 2.0 / (m.rate * m.rate)};
          },
          [](const LogNormalWeights& m) {
            const double s2 = m.sigma * m.sigma;
            return Moments{std::exp(m.mu + 0.5 * s2), std::expm1(s2) * std::exp(2.0 * m.mu + s2),
                           std::exp(2.0 * m.mu + 2.0 * s2)};
          },
          [](const GammaWeights& m) {
            return Moments{m.shape * m.scale, m.shape * m.scale * m.scale,
                           m.shape * (m.shape + 1.0) * m.scale * m.scale};
          },
          [&](const ParetoWeights& m) {
            const double mean = m.alpha > 1.0 ? m.alpha * m.xm / (m.alpha - 1.0) : kInf;
            const double second = m.alpha > 2.0 ? m.alpha * m.xm * m.xm / (m.alpha - 2.0) : kInf;
            return from_mean_second(mean, second);
          },
          [&](const ParetoLogWeights& m) {
            // E W^k = xm^k (1 + k/(alpha-k) + k/(alpha-k)^2) for alpha > k.
            auto moment = [&](double k) {
              if (m.alpha <= k) return kInf;
              const double d = m.alpha - k;
              return std::pow(m.xm, k) * (1.0 + k / d + k / (d * d));
            };
            return from_mean_second(moment(1.0), moment(2.0));
          },
      },
      model);
}

double density(const WeightModel& model, double x) {
  validate(model);
  return std::visit(
      Overloaded{
          [&](const ConstantWeights&) -> double {
            throw Error(ErrorKind::kUnsupportedModel, "constant weights have no density");
          },
          [&](const ExponentialWeights& m) { return x < 0.0 ? 0.0 : m.rate * std::exp(-m.rate * x); },
          [&](const LogNormalWeights& m) { return lognormal_density(m.mu, m.sigma, x); },
          [&](const GammaWeights& m) { return gamma_density(m.shape, m.scale, x); },
          [&](const ParetoWeights& m) {
            return x < m.xm ? 0.0 : m.alpha * std::pow(m.xm, m.alpha) * std::pow(x, -m.alpha - 1.0);
          },
          [&](const ParetoLogWeights& m) {
            if (x < m.xm) return 0.0;
            const double v = std::log(x / m.xm);
            return std::exp(-m.alpha * v) * (m.alpha * (1.0 + v) - 1.0) / x;
          },
      },
      model);
}

double survival(const WeightModel& model, double x) {
  validate(model);
  return std::visit(
      Overloaded{
          [&](const ConstantWeights&) -> double {
            throw Error(ErrorKind::kUnsupportedModel, "constant weights depend on n");
          },
          [&](const ExponentialWeights& m) { return x <= 0.0 ? 1.0 : std::exp(-m.rate * x); },
          [&](const LogNormalWeights& m) {
            return x <= 0.0 ? 1.0
                            : 0.5 * std::erfc((std::log(x) - m.mu) / (m.sigma * std::numbers::sqrt2));
          },
          [&](const GammaWeights& m) {
            return x <= 0.0 ? 1.0 : boost::math::gamma_q(m.shape, x / m.scale);
          },
          [&](const ParetoWeights& m) { return x <= m.xm ? 1.0 : std::pow(m.xm / x, m.alpha); },
          [&](const ParetoLogWeights& m) {
            return x <= m.xm ? 1.0 : pareto_log_survival_v(m.alpha, std::log(x / m.xm));
          },
      },
      model);
}

double support_min(const WeightModel& model) {
  return std::visit(Overloaded{
                        [](const ParetoWeights& m) { return m.xm; },
                        [](const ParetoLogWeights& m) { return m.xm; },
                        [](const auto&) { return 0.0; },
                    },
                    model);
}

double truncated_second_moment(const WeightModel& model, double x) {
  validate(model);
  require(x > 0.0 && !std::isnan(x), "truncation point must be > 0");
  if (const auto* m = std::get_if<ParetoWeights>(&model)) {
    if (x <= m->xm) return 0.0;
    if (std::isinf(x)) return analytic_moments(model).second;
    const double scale = m->alpha * std::pow(m->xm, m->alpha);
    if (m->alpha == 2.0) return scale * std::log(x / m->xm);
    return scale * (std::pow(x, 2.0 - m->alpha) - std::pow(m->xm, 2.0 - m->alpha)) / (2.0 - m->alpha);
  }
  if (std::holds_alternative<ConstantWeights>(model)) {
    throw Error(ErrorKind::kUnsupportedModel, "constant weights depend on n");
  }
  if (x <= support_min(model)) return 0.0;
  return partial_moment(model, 2, support_min(model), x);
}

double truncated_first_moment_tail(const WeightModel& model, double x) {
  validate(model);
  require(x >= 0.0 && !std::isnan(x), "truncation point must be >= 0");
  if (const auto* m = std::get_if<ParetoWeights>(&model)) {
    if (m->alpha <= 1.0) return kInf;
    if (x <= m->xm) return m->alpha * m->xm / (m->alpha - 1.0);
    return m->alpha * std::pow(m->xm, m->alpha) * std::pow(x, 1.0 - m->alpha) / (m->alpha - 1.0);
  }
  if (std::holds_alternative<ConstantWeights>(model)) {
    throw Error(ErrorKind::kUnsupportedModel, "constant weights depend on n");
  }
  if (!std::isfinite(analytic_moments(model).mean)) return kInf;
  if (std::isinf(x)) return 0.0;
  return partial_moment(model, 1, std::max(x, support_min(model)), kInf);
}

double TailParams::h(double x) const {
  return h_kind == SlowlyVarying::kConstant ? 1.0 : 1.0 + std::log(x / xm);
}

std::optional<TailParams> tail_params(const WeightModel& model) {
  validate(model);
  if (const auto* m = std::get_if<ParetoWeights>(&model)) {
    return TailParams{m->alpha, std::pow(m->xm, m->alpha), SlowlyVarying::kConstant, m->xm};
  }
  if (const auto* m = std::get_if<ParetoLogWeights>(&model)) {
    return TailParams{m->alpha, std::pow(m->xm, m->alpha), SlowlyVarying::kLogarithmic, m->xm};
  }
  return std::nullopt;
}

namespace {

TailParams require_stable_domain(const WeightModel& model) {
  const auto tail = tail_params(model);
  if (!tail) {
    throw Error(ErrorKind::kUnsupportedModel, model_name(model) + " has no regularly varying tail");
  }
  if (!(tail->alpha > 1.0 && tail->alpha < 2.0)) {
    throw Error(ErrorKind::kHypothesisViolation,
                "tail exponent " + std::to_string(tail->alpha) + " is outside (1, 2)");
  }
  return *tail;
}

}  // namespace

std::vector<Lemma1Ratios> lemma1_ratio_check(const WeightModel& model,
                                             std::span<const double> x_grid) {
  const TailParams tail = require_stable_domain(model);
  const double a = tail.alpha;
  std::vector<Lemma1Ratios> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    require(x > tail.xm, "lemma1 grid points must exceed xm");
    Lemma1Ratios r{};
    r.x = x;
    r.second_moment = truncated_second_moment(model, x);
    r.tail_moment = truncated_first_moment_tail(model, x);
    const double base_second = tail.c * std::pow(x, 2.0 - a) * tail.h(x);
    const double base_tail = tail.c * std::pow(x, 1.0 - a) * tail.h(x);
    r.ratio_second = r.second_moment / (a / (2.0 - a) * base_second);
    r.ratio_tail_karamata = r.tail_moment / (a / (a - 1.0) * base_tail);
    r.ratio_tail_printed = r.tail_moment / ((2.0 - a) / (a - 1.0) * base_tail);
    out.push_back(r);
  }
  return out;
}

double compute_norming(const WeightModel& model, std::size_t n) {
  const TailParams tail = require_stable_domain(model);
  if (n < 2) throw Error(ErrorKind::kParameterDomain, "norming needs n >= 2");
  const double nd = static_cast<double>(n);
  // r(a) = n E W^2 I(W <= a) / a^2 is 0 at xm, rises, then decays to 0; a_n
  // is where it falls back through 1.
  auto ratio = [&](double a) { return nd * truncated_second_moment(model, a) / (a * a); };

  double lo = tail.xm;
  double hi = tail.xm;
  bool above = false;
  constexpr double kMaxWeight = 1e150;
  for (;;) {
    const double next = hi * (above ? 2.0 : 1.25);
    if (next > kMaxWeight) {
      throw Error(ErrorKind::kBracketing,
                  "no root of a^2 = n E W^2 I(W <= a) found for n = " + std::to_string(n));
    }
    lo = hi;
    hi = next;
    const double r = ratio(hi);
    if (r >= 1.0) {
      above = true;
    } else if (above) {
      break;
    }
  }
  // Bisection on the geometric mean keeps relative precision uniform.
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-14; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (ratio(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace grg
