#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "grg/limits.hpp"
#include "grg/stable.hpp"
#include "grg/weights.hpp"

namespace grg {

/// Parses "family:key=value,key=value", e.g. "pareto:alpha=1.5,xm=1".
/// Families: constant(lambda), exponential(rate), lognormal(mu, sigma),
/// gamma(shape, scale), pareto(alpha, xm), paretolog(alpha, xm).
WeightModel parse_model_spec(const std::string& spec);

nlohmann::json to_json(const WeightModel& model);
/// Accepts {"type": "pareto", "alpha": 1.5, "xm": 1} or the string form "pareto:alpha=1.5,xm=1".
WeightModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StableParams& p);
StableParams stable_from_json(const nlohmann::json& j);

/// Experiment config schema:
///   model         object or spec string (required)
///   n_grid        array of vertex counts (required)
///   replications  count per n (required)
///   master_seed   unsigned 64-bit (default 0)
///   theorem       "T1" | "T2" | "LLN" | "AUDIT" (required)
///   sampler       "naive" | "fast" (default "fast")
///   t_values      array of reals (AUDIT, default [1.0])
///   pair_draws    Monte Carlo weight pairs per n (AUDIT, default 1e6)
///   threads       worker count, 0 = auto (default 0)
/// Unknown keys are rejected. Throws kConfig on schema violations.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace grg
