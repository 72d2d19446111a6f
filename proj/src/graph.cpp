#include "grg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "grg/error.hpp"
#include "grg/rng.hpp"

namespace grg {

double edge_probability(double w_i, double w_j, double total_weight) {
  if (!(total_weight > 0.0)) {
    throw Error(ErrorKind::kParameterDomain, "total weight L_n must be > 0");
  }
  if (!(w_i >= 0.0 && w_j >= 0.0)) {
    throw Error(ErrorKind::kParameterDomain, "weights must be >= 0");
  }
  const double prod = w_i * w_j;
  return prod / (total_weight + prod);
}

const char* to_string(SamplerKind kind) {
  return kind == SamplerKind::kNaive ? "naive" : "fast";
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "naive") return SamplerKind::kNaive;
  if (name == "fast") return SamplerKind::kFast;
  throw Error(ErrorKind::kConfig, "unknown sampler '" + name + "' (expected naive|fast)");
}

namespace {

void add_edge(GraphSample& g, std::uint32_t a, std::uint32_t b, bool keep) {
  ++g.edge_count;
  ++g.degrees[a];
  ++g.degrees[b];
  if (keep) g.edges.emplace_back(std::min(a, b), std::max(a, b));
}

GraphSample empty_sample(const WeightVector& weights, std::uint64_t seed, SamplerKind kind) {
  if (weights.size() < 2) throw Error(ErrorKind::kParameterDomain, "need at least 2 vertices");
  GraphSample g;
  g.n = weights.size();
  g.degrees.assign(g.n, 0);
  g.seed = seed;
  g.sampler = kind;
  return g;
}

}  // namespace

GraphSample sample_graph_naive(const WeightVector& weights, std::uint64_t seed,
                               SampleOptions options) {
  GraphSample g = empty_sample(weights, seed, SamplerKind::kNaive);
  Rng rng(seed);
  const double total = weights.sum();
  const auto n = static_cast<std::uint32_t>(g.n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      ++g.candidates;
      if (rng.bernoulli(edge_probability(weights[i], weights[j], total))) {
        add_edge(g, i, j, options.keep_edges);
      }
    }
  }
  if (options.keep_edges) std::sort(g.edges.begin(), g.edges.end());
  return g;
}

GraphSample sample_graph_fast(const WeightVector& weights, std::uint64_t seed,
                              SampleOptions options) {
  GraphSample g = empty_sample(weights, seed, SamplerKind::kFast);
  Rng rng(seed);
  const double total = weights.sum();
  const std::size_t n = g.n;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  // Stable tie-break on the index keeps the result a function of the seed only.
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return weights[a] > weights[b] || (weights[a] == weights[b] && a < b);
  });
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = weights[order[k]];

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double scale = w[i] / total;
    std::size_t j = i + 1;
    while (j < n) {
      double q = w[j] * scale;
      if (q >= 1.0) {
        ++g.candidates;
        if (rng.bernoulli(edge_probability(w[i], w[j], total))) {
          add_edge(g, order[i], order[j], options.keep_edges);
        }
        ++j;
        continue;
      }
      if (q <= 0.0) break;
      // Number of envelope failures before the next envelope success.
      const double skip = std::floor(std::log(rng.uniform_open()) / std::log1p(-q));
      if (skip >= static_cast<double>(n - j)) break;
      j += static_cast<std::size_t>(skip);
      ++g.candidates;
      const double p = edge_probability(w[i], w[j], total);
      if (rng.uniform() * q < p) add_edge(g, order[i], order[j], options.keep_edges);
      ++j;
    }
  }
  if (options.keep_edges) std::sort(g.edges.begin(), g.edges.end());
  return g;
}

GraphSample sample_graph(SamplerKind kind, const WeightVector& weights, std::uint64_t seed,
                         SampleOptions options) {
  return kind == SamplerKind::kNaive ? sample_graph_naive(weights, seed, options)
                                     : sample_graph_fast(weights, seed, options);
}

double EdgeCountPmf::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) m += static_cast<double>(k) * probabilities[k];
  return m;
}

EdgeCountPmf exact_edge_count_pmf(const WeightVector& weights) {
  const std::size_t n = weights.size();
  if (n > kExactPmfMaxVertices) {
    throw Error(ErrorKind::kSize, "exact edge-count pmf is limited to n <= 12, got " +
                                      std::to_string(n));
  }
  std::vector<double> pmf{1.0};
  pmf.reserve(n * (n - 1) / 2 + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = edge_probability(weights[i], weights[j], weights.sum());
      pmf.push_back(0.0);
      for (std::size_t k = pmf.size() - 1; k > 0; --k) {
        pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
      }
      pmf[0] *= 1.0 - p;
    }
  }
  return EdgeCountPmf{std::move(pmf)};
}

const std::vector<std::uint32_t>& degree_sequence(const GraphSample& sample) {
  return sample.degrees;
}

void write_edge_list(std::ostream& os, const GraphSample& sample) {
  if (sample.edges.size() != sample.edge_count) {
    throw Error(ErrorKind::kConfig, "edge list was not recorded; sample with keep_edges");
  }
  for (const auto& [i, j] : sample.edges) os << i << ' ' << j << '\n';
}

}  // namespace grg
