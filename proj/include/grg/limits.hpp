#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grg/graph.hpp"
#include "grg/stats.hpp"
#include "grg/weights.hpp"

namespace grg {

enum class Theorem { kGaussian, kStable, kLln, kAudit };

const char* to_string(Theorem theorem);  // "T1", "T2", "LLN", "AUDIT"
Theorem parse_theorem(const std::string& name);

struct ExperimentConfig {
  WeightModel model = ExponentialWeights{1.0};
  std::vector<std::size_t> n_grid;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  Theorem theorem = Theorem::kGaussian;
  SamplerKind sampler = SamplerKind::kFast;
  std::vector<double> t_values{1.0};  // audit only
  std::size_t pair_draws = 1'000'000;  // audit only: Monte Carlo weight pairs per n
  unsigned threads = 0;                // 0 = hardware concurrency; never affects results
};

/// Throws kConfig for malformed grids/counts and kHypothesisViolation when the
/// model does not satisfy the selected theorem's hypotheses.
void validate(const ExperimentConfig& config);

/// Seed of replication `rep` at vertex count n on the given stream.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t stream, std::size_t n,
                               std::size_t rep);

/// (2 E_n - n EW) / sqrt(n (2 EW + Var W)).
double normalize_t1(std::uint64_t edge_count, std::size_t n, double mean, double variance);

/// (2 E_n - n EW) / a_n.
double normalize_t2(std::uint64_t edge_count, std::size_t n, double mean, double a_n);

/// statistic = (2 E_n - center) / scale.
struct Norming {
  double center = 0.0;  // n EW
  double scale = 1.0;   // sqrt(n (2EW + VarW)) for T1, a_n for T2
};

struct NormalizedSample {
  std::size_t n = 0;
  std::vector<double> values;           // one statistic per replication
  std::vector<std::uint64_t> edge_counts;
  std::vector<double> total_weights;    // L_n per replication
  Norming norming;
};

struct StatisticPoint {
  std::size_t n = 0;
  NormalizedSample edge;  // T1/T2: edge statistic. LLN: E_n / n
  /// T2 only: (L_n - n EW) / a_n from the same replications.
  std::optional<std::vector<double>> weight_sum;
  std::optional<KsResult> ks;  // T1: vs Phi; T2: edge vs weight-sum; LLN: none
  Summary summary;
  double target = 0.0;  // LLN: EW / 2
};

struct TrendVerdict {
  bool non_increasing = true;     // consecutive KS D never increase
  bool last_below_first = false;  // D(last n) < D(first n)
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<StatisticPoint> points;
  std::optional<TrendVerdict> trend;
};

/// Gaussian limit of the edge count under finite EW^2.
ExperimentResult run_theorem1(const ExperimentConfig& config);

/// Stable limit: compares (2 E_n - n EW)/a_n with (L_n - n EW)/a_n by a
/// two-sample KS test; both share the limit law of the weight sums.
ExperimentResult run_theorem2(const ExperimentConfig& config);

/// E_n / n against EW / 2.
ExperimentResult run_lln(const ExperimentConfig& config);

/// Dispatches on config.theorem (not kAudit).
ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Proof audit

/// Remainder bounds and vanishing terms, evaluated literally. Double sums run
/// over all ordered pairs including i = j.
struct AuditTerms {
  double selfloop_bound = 0.0;  // 2|t|/c_n * sum W^2 / L
  double i1_bound = 0.0;        // |t|^3 L / (12 c_n^3)
  double i3_bound = 0.0;        // t^2/c_n^2 (sum W^2 / n)^2 (n / L)^2
  double t_a = 0.0;             // (1/a_n) sum W^2 / L
  double t_b = 0.0;             // (1/a_n^2) sum_ij p_ij
  double t_c = 0.0;             // (1/a_n) sum_ij W_i^2 W_j^2 / (L (L + W_i W_j))
  double t_d = 0.0;             // (1/a_n^2) sum_ij p_ij^2
  static constexpr double kRemainderCoefficient = 0.5;  // |O_1| <= 1/2
};

inline constexpr std::size_t kAuditMaxVertices = 20'000;

/// Throws kSize above kAuditMaxVertices and kParameterDomain for c_n, a_n <= 0.
AuditTerms proof_audit(const WeightVector& weights, double t, double c_n, double a_n,
                       unsigned threads = 1);

/// (1/a_n) E W1^2 W2^2 I(W1 W2 <= n) and (n/a_n) E W1 W2 I(W1 W2 > n).
struct PairMoments {
  double bounded_product = 0.0;
  double tail_product = 0.0;
};

PairMoments pair_moments_monte_carlo(const WeightModel& model, std::size_t n, double a_n,
                                     std::size_t draws, std::uint64_t seed);

/// Same quantities by one-dimensional quadrature over W2 with the exact
/// conditional truncated moments of W1. Pareto family only (nullopt otherwise).
std::optional<PairMoments> pair_moments_exact(const WeightModel& model, std::size_t n, double a_n);

/// Normings the audit uses at vertex count n. c_n is 0.5 sqrt(n Var W) when
/// the variance is finite and positive, 0.5 sqrt(n (2EW + Var W)) when it is
/// zero, and a_n / 2 when it is infinite. a_n comes from compute_norming for
/// heavy tails and is 2 c_n otherwise.
struct AuditNorming {
  double c_n = 0.0;
  double a_n = 0.0;
};

AuditNorming audit_norming(const WeightModel& model, std::size_t n);

struct AuditRow {
  std::size_t n = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double t = 0.0;
  AuditTerms terms;
};

struct AuditPoint {
  std::size_t n = 0;
  AuditNorming norming;
  double t = 0.0;
  AuditTerms medians;
  PairMoments pair_mc;
  std::optional<PairMoments> pair_exact;
};

/// Strictly decreasing medians across the n grid, per term.
struct AuditTrend {
  bool selfloop_bound = false;
  bool i1_bound = false;
  bool i3_bound = false;
  bool t_a = false;
  bool t_b = false;
  bool t_c = false;
  bool t_d = false;
  bool pair_bounded_mc = false;
  bool pair_tail_mc = false;
  std::optional<bool> pair_bounded_exact;
  std::optional<bool> pair_tail_exact;

  bool all_terms() const {
    return selfloop_bound && i1_bound && i3_bound && t_a && t_b && t_c && t_d;
  }
};

struct AuditResult {
  ExperimentConfig config;
  std::vector<AuditRow> rows;      // ordered by (n, replication, t)
  std::vector<AuditPoint> points;  // ordered by (n, t)
  std::vector<AuditTrend> trends;  // one per t value
};

AuditResult run_audit(const ExperimentConfig& config);

}  // namespace grg
