#include "grg/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/quadrature.hpp"
#include "grg/error.hpp"
#include "grg/parallel.hpp"
#include "grg/rng.hpp"

namespace grg {
namespace {

// The naive sampler is O(n^2); experiments above this size must use the fast one.
constexpr std::size_t kNaiveMaxVertices = 50'000;
constexpr std::size_t kMinTheoremReplications = 100;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfig, what); }

Moments moments_at(const WeightModel& model, std::size_t n) { return analytic_moments(model, n); }

double require_heavy_tail(const WeightModel& model) {
  const auto tail = tail_params(model);
  if (!tail || !(tail->alpha > 1.0 && tail->alpha < 2.0)) {
    throw Error(ErrorKind::kHypothesisViolation,
                "the stable limit needs a regularly varying tail with alpha in (1, 2); got " +
                    model_name(model));
  }
  return tail->alpha;
}

TrendVerdict ks_trend(const std::vector<StatisticPoint>& points) {
  TrendVerdict v;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (points[k].ks->d_stat > points[k - 1].ks->d_stat) v.non_increasing = false;
  }
  v.last_below_first = points.size() > 1 && points.back().ks->d_stat < points.front().ks->d_stat;
  return v;
}

struct Replicate {
  std::uint64_t edge_count = 0;
  double total_weight = 0.0;
};

// Draws `reps` independent (weights, graph) pairs at vertex count n.
std::vector<Replicate> simulate(const ExperimentConfig& config, std::size_t n) {
  std::vector<Replicate> out(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    const WeightVector w =
        sample_weights(config.model, n, replication_seed(config.master_seed, stream::kWeights, n, r));
    const GraphSample g =
        sample_graph(config.sampler, w, replication_seed(config.master_seed, stream::kGraph, n, r));
    out[r] = Replicate{g.edge_count, w.sum()};
  });
  return out;
}

NormalizedSample normalized(std::size_t n, const std::vector<Replicate>& reps, Norming norming) {
  NormalizedSample s;
  s.n = n;
  s.norming = norming;
  s.values.reserve(reps.size());
  for (const auto& r : reps) {
    s.values.push_back((2.0 * static_cast<double>(r.edge_count) - norming.center) / norming.scale);
    s.edge_counts.push_back(r.edge_count);
    s.total_weights.push_back(r.total_weight);
  }
  return s;
}

}  // namespace

const char* to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::kGaussian: return "T1";
    case Theorem::kStable: return "T2";
    case Theorem::kLln: return "LLN";
    case Theorem::kAudit: return "AUDIT";
  }
  return "?";
}

Theorem parse_theorem(const std::string& name) {
  if (name == "T1") return Theorem::kGaussian;
  if (name == "T2") return Theorem::kStable;
  if (name == "LLN") return Theorem::kLln;
  if (name == "AUDIT") return Theorem::kAudit;
  config_error("unknown theorem '" + name + "' (expected T1|T2|LLN|AUDIT)");
}

void validate(const ExperimentConfig& config) {
  validate(config.model);
  if (config.n_grid.empty()) config_error("n_grid must not be empty");
  for (std::size_t n : config.n_grid) {
    if (n < 2) config_error("every n in n_grid must be >= 2");
    if (n > std::numeric_limits<std::uint32_t>::max()) config_error("n exceeds 32-bit vertex ids");
    if (config.sampler == SamplerKind::kNaive && n > kNaiveMaxVertices) {
      config_error("naive sampler is limited to n <= " + std::to_string(kNaiveMaxVertices));
    }
  }
  if (config.replications == 0) config_error("replications must be >= 1");
  switch (config.theorem) {
    case Theorem::kGaussian:
      if (config.replications < kMinTheoremReplications) config_error("T1 needs >= 100 replications");
      for (std::size_t n : config.n_grid) {
        if (!moments_at(config.model, n).finite_variance()) {
          throw Error(ErrorKind::kHypothesisViolation,
                      "the Gaussian limit needs E W^2 < inf; got " + model_name(config.model));
        }
      }
      break;
    case Theorem::kStable:
      if (config.replications < kMinTheoremReplications) config_error("T2 needs >= 100 replications");
      require_heavy_tail(config.model);
      break;
    case Theorem::kLln:
      for (std::size_t n : config.n_grid) {
        if (!std::isfinite(moments_at(config.model, n).mean)) {
          throw Error(ErrorKind::kHypothesisViolation, "the LLN needs E W < inf");
        }
      }
      break;
    case Theorem::kAudit:
      if (config.t_values.empty()) config_error("audit needs at least one t value");
      for (std::size_t n : config.n_grid) {
        if (n > kAuditMaxVertices) {
          throw Error(ErrorKind::kSize, "audit double sums are limited to n <= 20000");
        }
        moments_at(config.model, n);  // resolves Constant models
      }
      if (config.pair_draws == 0) config_error("pair_draws must be >= 1");
      break;
  }
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t stream, std::size_t n,
                               std::size_t rep) {
  return derive_seed(derive_seed(master, stream, n), 0, rep);
}

double normalize_t1(std::uint64_t edge_count, std::size_t n, double mean, double variance) {
  const double nd = static_cast<double>(n);
  const double denom2 = nd * (2.0 * mean + variance);
  if (!(denom2 > 0.0) || !std::isfinite(denom2)) {
    throw Error(ErrorKind::kParameterDomain, "n (2 EW + Var W) must be positive and finite");
  }
  return (2.0 * static_cast<double>(edge_count) - nd * mean) / std::sqrt(denom2);
}

double normalize_t2(std::uint64_t edge_count, std::size_t n, double mean, double a_n) {
  if (!(a_n > 0.0)) throw Error(ErrorKind::kParameterDomain, "a_n must be > 0");
  return (2.0 * static_cast<double>(edge_count) - static_cast<double>(n) * mean) / a_n;
}

ExperimentResult run_theorem1(const ExperimentConfig& config) {
  if (config.theorem != Theorem::kGaussian) config_error("run_theorem1 needs theorem T1");
  validate(config);
  ExperimentResult result{config, {}, {}};
  for (std::size_t n : config.n_grid) {
    const Moments m = moments_at(config.model, n);
    const double nd = static_cast<double>(n);
    // Checks the denominator through the public normalization.
    normalize_t1(0, n, m.mean, m.variance);
    const Norming norming{nd * m.mean, std::sqrt(nd * (2.0 * m.mean + m.variance))};
    StatisticPoint p;
    p.n = n;
    p.edge = normalized(n, simulate(config, n), norming);
    p.ks = ks_one_sample(p.edge.values, normal_cdf);
    p.summary = summarize(p.edge.values);
    result.points.push_back(std::move(p));
  }
  result.trend = ks_trend(result.points);
  return result;
}

ExperimentResult run_theorem2(const ExperimentConfig& config) {
  if (config.theorem != Theorem::kStable) config_error("run_theorem2 needs theorem T2");
  validate(config);
  ExperimentResult result{config, {}, {}};
  const double mean = analytic_moments(config.model).mean;
  for (std::size_t n : config.n_grid) {
    const double a_n = compute_norming(config.model, n);
    const double center = static_cast<double>(n) * mean;
    StatisticPoint p;
    p.n = n;
    p.edge = normalized(n, simulate(config, n), Norming{center, a_n});
    std::vector<double> weight_sum;
    weight_sum.reserve(p.edge.total_weights.size());
    for (double total : p.edge.total_weights) weight_sum.push_back((total - center) / a_n);
    p.ks = ks_two_sample(p.edge.values, weight_sum);
    p.weight_sum = std::move(weight_sum);
    p.summary = summarize(p.edge.values);
    result.points.push_back(std::move(p));
  }
  result.trend = ks_trend(result.points);
  return result;
}

ExperimentResult run_lln(const ExperimentConfig& config) {
  if (config.theorem != Theorem::kLln) config_error("run_lln needs theorem LLN");
  validate(config);
  ExperimentResult result{config, {}, {}};
  for (std::size_t n : config.n_grid) {
    const Moments m = moments_at(config.model, n);
    const double nd = static_cast<double>(n);
    StatisticPoint p;
    p.n = n;
    // E_n / n is (2 E_n - 0) / (2n) in the shared normalization.
    p.edge = normalized(n, simulate(config, n), Norming{0.0, 2.0 * nd});
    p.summary = summarize(p.edge.values);
    p.target = m.mean / 2.0;
    result.points.push_back(std::move(p));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.theorem) {
    case Theorem::kGaussian: return run_theorem1(config);
    case Theorem::kStable: return run_theorem2(config);
    case Theorem::kLln: return run_lln(config);
    case Theorem::kAudit: break;
  }
  config_error("AUDIT configs run through run_audit");
}

// ---------------------------------------------------------------------------

AuditTerms proof_audit(const WeightVector& weights, double t, double c_n, double a_n,
                       unsigned threads) {
  const std::size_t n = weights.size();
  if (n > kAuditMaxVertices) {
    throw Error(ErrorKind::kSize, "proof audit is limited to n <= 20000, got " + std::to_string(n));
  }
  if (n < 1) throw Error(ErrorKind::kParameterDomain, "empty weight vector");
  if (!(c_n > 0.0) || !(a_n > 0.0)) throw Error(ErrorKind::kParameterDomain, "c_n and a_n must be > 0");

  const double total = weights.sum();
  const double sum_sq = weights.sum_sq();
  const double nd = static_cast<double>(n);
  const double at = std::abs(t);

  AuditTerms out;
  out.selfloop_bound = 2.0 * at / c_n * sum_sq / total;
  out.i1_bound = at * at * at * total / (12.0 * c_n * c_n * c_n);
  const double mean_sq = sum_sq / nd;
  const double inv_mean = nd / total;
  out.i3_bound = t * t / (c_n * c_n) * mean_sq * mean_sq * inv_mean * inv_mean;
  out.t_a = sum_sq / (a_n * total);

  // Row sums over j > i, reduced in row order so the result does not depend
  // on the thread count.
  struct RowSums {
    double p = 0.0;        // sum p_ij
    double p_prod = 0.0;   // sum p_ij * W_i W_j / L
    double p_sq = 0.0;     // sum p_ij^2
  };
  std::vector<RowSums> rows(n);
  const auto w = weights.values();
  parallel_for(n, threads, [&](std::size_t i) {
    RowSums r;
    const double wi = w[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prod = wi * w[j];
      const double p = prod / (total + prod);
      r.p += p;
      r.p_prod += p * prod;
      r.p_sq += p * p;
    }
    rows[i] = r;
  });
  detail::CompensatedSum sb, sc, sd;
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = w[i] * w[i];
    const double p = prod / (total + prod);
    sb.add(2.0 * rows[i].p + p);
    sc.add(2.0 * rows[i].p_prod + p * prod);
    sd.add(2.0 * rows[i].p_sq + p * p);
  }
  out.t_b = sb.value() / (a_n * a_n);
  out.t_c = sc.value() / (total * a_n);
  out.t_d = sd.value() / (a_n * a_n);
  return out;
}

PairMoments pair_moments_monte_carlo(const WeightModel& model, std::size_t n, double a_n,
                                     std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw Error(ErrorKind::kParameterDomain, "need at least one pair");
  if (!(a_n > 0.0)) throw Error(ErrorKind::kParameterDomain, "a_n must be > 0");
  const double nd = static_cast<double>(n);
  std::vector<double> values;
  if (const auto* c = std::get_if<ConstantWeights>(&model)) {
    values.assign(2 * draws, constant_weight(c->lambda, n));
  } else {
    const WeightVector w = sample_weights(model, 2 * draws, seed);
    values.assign(w.values().begin(), w.values().end());
  }
  detail::CompensatedSum bounded, tail;
  for (std::size_t k = 0; k < draws; ++k) {
    const double prod = values[2 * k] * values[2 * k + 1];
    if (prod <= nd) {
      bounded.add(prod * prod);
    } else {
      tail.add(prod);
    }
  }
  const double dd = static_cast<double>(draws);
  return PairMoments{bounded.value() / dd / a_n, nd / a_n * tail.value() / dd};
}

std::optional<PairMoments> pair_moments_exact(const WeightModel& model, std::size_t n, double a_n) {
  if (!tail_params(model)) return std::nullopt;
  if (!(a_n > 0.0)) throw Error(ErrorKind::kParameterDomain, "a_n must be > 0");
  const double nd = static_cast<double>(n);
  const double s = support_min(model);
  const double mean = analytic_moments(model).mean;
  const double ylo = std::log(s);
  const double yhi = std::log(nd / s);

  double bounded = 0.0;
  double tail = 0.0;
  if (yhi > ylo) {
    // W2 = e^y; density of y is f(e^y) e^y.
    bounded = detail::integrate(
        [&](double y) {
          const double w2 = std::exp(y);
          return density(model, w2) * w2 * w2 * w2 * truncated_second_moment(model, nd / w2);
        },
        ylo, yhi, 1e-8, 1e-9);
    tail = detail::integrate(
        [&](double y) {
          const double w2 = std::exp(y);
          return density(model, w2) * w2 * w2 * truncated_first_moment_tail(model, nd / w2);
        },
        ylo, yhi, 1e-8, 1e-9);
  }
  // For W2 >= n / s every W1 exceeds n / W2.
  tail += mean * truncated_first_moment_tail(model, std::max(nd / s, s));
  return PairMoments{bounded / a_n, nd / a_n * tail};
}

AuditNorming audit_norming(const WeightModel& model, std::size_t n) {
  const Moments m = analytic_moments(model, n);
  const double nd = static_cast<double>(n);
  AuditNorming out;
  if (!m.finite_variance()) {
    out.a_n = compute_norming(model, n);
    out.c_n = out.a_n / 2.0;
    return out;
  }
  if (m.variance > 0.0) {
    out.c_n = 0.5 * std::sqrt(nd * m.variance);
  } else {
    out.c_n = 0.5 * std::sqrt(nd * (2.0 * m.mean + m.variance));
  }
  const auto tail = tail_params(model);
  out.a_n = tail && tail->alpha > 1.0 && tail->alpha < 2.0 ? compute_norming(model, n) : 2.0 * out.c_n;
  return out;
}

AuditResult run_audit(const ExperimentConfig& config) {
  if (config.theorem != Theorem::kAudit) config_error("run_audit needs theorem AUDIT");
  validate(config);
  AuditResult result;
  result.config = config;
  const std::size_t nt = config.t_values.size();

  for (std::size_t n : config.n_grid) {
    const AuditNorming norming = audit_norming(config.model, n);
    std::vector<AuditRow> rows(config.replications * nt);
    parallel_for(config.replications, config.threads, [&](std::size_t r) {
      const std::uint64_t seed = replication_seed(config.master_seed, stream::kWeights, n, r);
      const WeightVector w = sample_weights(config.model, n, seed);
      for (std::size_t k = 0; k < nt; ++k) {
        const double t = config.t_values[k];
        rows[r * nt + k] = AuditRow{n, r, seed, t, proof_audit(w, t, norming.c_n, norming.a_n)};
      }
    });

    const PairMoments mc = pair_moments_monte_carlo(
        config.model, n, norming.a_n, config.pair_draws,
        replication_seed(config.master_seed, stream::kPairs, n, 0));
    const auto exact = pair_moments_exact(config.model, n, norming.a_n);

    for (std::size_t k = 0; k < nt; ++k) {
      auto med = [&](double AuditTerms::*field) {
        std::vector<double> v;
        for (std::size_t r = 0; r < config.replications; ++r) v.push_back(rows[r * nt + k].terms.*field);
        return median(std::move(v));
      };
      AuditPoint p;
      p.n = n;
      p.norming = norming;
      p.t = config.t_values[k];
      p.medians.selfloop_bound = med(&AuditTerms::selfloop_bound);
      p.medians.i1_bound = med(&AuditTerms::i1_bound);
      p.medians.i3_bound = med(&AuditTerms::i3_bound);
      p.medians.t_a = med(&AuditTerms::t_a);
      p.medians.t_b = med(&AuditTerms::t_b);
      p.medians.t_c = med(&AuditTerms::t_c);
      p.medians.t_d = med(&AuditTerms::t_d);
      p.pair_mc = mc;
      p.pair_exact = exact;
      result.points.push_back(p);
    }
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }

  // points are ordered (n, t); the trend for t index k strides by nt.
  for (std::size_t k = 0; k < nt; ++k) {
    auto decreasing = [&](auto get) {
      bool ok = true;
      for (std::size_t g = 1; g < config.n_grid.size(); ++g) {
        if (!(get(result.points[g * nt + k]) < get(result.points[(g - 1) * nt + k]))) ok = false;
      }
      return ok;
    };
    AuditTrend tr;
    tr.selfloop_bound = decreasing([](const AuditPoint& p) { return p.medians.selfloop_bound; });
    tr.i1_bound = decreasing([](const AuditPoint& p) { return p.medians.i1_bound; });
    tr.i3_bound = decreasing([](const AuditPoint& p) { return p.medians.i3_bound; });
    tr.t_a = decreasing([](const AuditPoint& p) { return p.medians.t_a; });
    tr.t_b = decreasing([](const AuditPoint& p) { return p.medians.t_b; });
    tr.t_c = decreasing([](const AuditPoint& p) { return p.medians.t_c; });
    tr.t_d = decreasing([](const AuditPoint& p) { return p.medians.t_d; });
    tr.pair_bounded_mc = decreasing([](const AuditPoint& p) { return p.pair_mc.bounded_product; });
    tr.pair_tail_mc = decreasing([](const AuditPoint& p) { return p.pair_mc.tail_product; });
    if (result.points.front().pair_exact) {
      tr.pair_bounded_exact = decreasing([](const AuditPoint& p) { return p.pair_exact->bounded_product; });
      tr.pair_tail_exact = decreasing([](const AuditPoint& p) { return p.pair_exact->tail_product; });
    }
    result.trends.push_back(tr);
  }
  return result;
}

}  // namespace grg
