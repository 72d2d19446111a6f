#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "grg/weights.hpp"

namespace grg {

/// W_i W_j / (L_n + W_i W_j). Throws kParameterDomain unless L_n > 0 and both
/// weights are non-negative.
double edge_probability(double w_i, double w_j, double total_weight);

enum class SamplerKind { kNaive, kFast };

const char* to_string(SamplerKind kind);
SamplerKind parse_sampler(const std::string& name);

struct SampleOptions {
  bool keep_edges = false;  // debug only; memory grows with the edge count
};

/// One realization of the generalized random graph. Adjacency is not kept;
/// the edge count and the degree sequence are all the limit theorems need.
struct GraphSample {
  std::size_t n = 0;
  std::uint64_t edge_count = 0;
  std::vector<std::uint32_t> degrees;  // original vertex order
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::kNaive;
  /// Vertex pairs the sampler inspected: every pair for the naive sampler,
  /// only landed skip positions for the fast one.
  std::uint64_t candidates = 0;
  /// 0-indexed (i, j), i < j, ascending; filled only with keep_edges.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Independent Bernoulli(p_ij) for every pair i < j. O(n^2).
GraphSample sample_graph_naive(const WeightVector& weights, std::uint64_t seed,
                               SampleOptions options = {});

/// Same law as the naive sampler in expected O(n log n + E_n) time.
///
/// Vertices are visited in decreasing weight order. Along a row the envelope
/// q_ij = min(1, w_i w_j / L_n) is non-increasing, so a geometric skip drawn
/// with the envelope at the current position dominates every pair it jumps
/// over. The landed pair is kept with probability p_ij / q, which is valid as
/// p_ij <= w_i w_j / L_n. Pairs with q = 1 get a direct Bernoulli draw.
GraphSample sample_graph_fast(const WeightVector& weights, std::uint64_t seed,
                              SampleOptions options = {});

GraphSample sample_graph(SamplerKind kind, const WeightVector& weights, std::uint64_t seed,
                         SampleOptions options = {});

/// Exact law of the edge count given the weights (Poisson-binomial), index k
/// holds P(E_n = k).
struct EdgeCountPmf {
  std::vector<double> probabilities;

  double mean() const;
};

/// Convolves [1 - p_ij, p_ij] over all pairs. Throws kSize for n > 12.
EdgeCountPmf exact_edge_count_pmf(const WeightVector& weights);

inline constexpr std::size_t kExactPmfMaxVertices = 12;

const std::vector<std::uint32_t>& degree_sequence(const GraphSample& sample);

/// "i j" per line, 0-indexed, ascending. Requires a sample taken with keep_edges.
void write_edge_list(std::ostream& os, const GraphSample& sample);

}  // namespace grg
