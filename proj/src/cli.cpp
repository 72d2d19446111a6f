#include "grg/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "grg/config.hpp"
#include "grg/error.hpp"
#include "grg/graph.hpp"
#include "grg/limits.hpp"
#include "grg/report.hpp"
#include "grg/rng.hpp"
#include "grg/weights.hpp"

namespace grg {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// --seed beats GRG_SEED, which beats the config file.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GRG_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::kConfig, std::string("GRG_SEED='") + env + "' is not an unsigned integer");
  }
  return fallback;
}

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> sampler;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_out) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  f.out = default_out;
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed (overrides GRG_SEED and the config)");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = auto");
  cmd->add_option("--sampler", f.sampler, "edge sampler")->check(CLI::IsMember({"naive", "fast"}));
}

ExperimentConfig apply_common(const CommonFlags& f) {
  ExperimentConfig config = load_config(f.config);
  config.master_seed = resolve_seed(f.seed, config.master_seed);
  if (f.threads) config.threads = *f.threads;
  if (f.sampler) config.sampler = parse_sampler(*f.sampler);
  return config;
}

int cmd_sample(const std::string& model_spec, std::size_t n, std::optional<std::uint64_t> seed_flag,
               const std::string& sampler_name, const std::string& out_path, const std::string& edges_path,
               std::ostream& out) {
  const WeightModel model = parse_model_spec(model_spec);
  const std::uint64_t seed = resolve_seed(seed_flag, 0);
  const SamplerKind sampler = parse_sampler(sampler_name);
  const WeightVector w = sample_weights(model, n, derive_seed(seed, stream::kWeights, 0));
  SampleOptions options;
  options.keep_edges = !edges_path.empty();
  const GraphSample g = sample_graph(sampler, w, derive_seed(seed, stream::kGraph, 0), options);

  std::uint32_t dmin = g.degrees.empty() ? 0 : g.degrees.front();
  std::uint32_t dmax = 0;
  for (auto d : g.degrees) {
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  const json summary = {
      {"schema_version", kSummarySchemaVersion},
      {"model", to_json(model)},
      {"n", g.n},
      {"seed", seed},
      {"sampler", to_string(g.sampler)},
      {"edge_count", g.edge_count},
      {"total_weight", w.sum()},
      {"sum_sq_weight", w.sum_sq()},
      {"degree", {{"min", dmin}, {"max", dmax}, {"mean", 2.0 * static_cast<double>(g.edge_count) / g.n}}},
      {"candidates", g.candidates},
  };
  if (!edges_path.empty()) {
    std::ofstream edges(edges_path);
    write_edge_list(edges, g);
    if (!edges) throw Error(ErrorKind::kIo, "cannot write " + edges_path);
  }
  if (out_path.empty()) {
    out << summary.dump(2) << '\n';
  } else {
    std::ofstream file(out_path);
    file << summary.dump(2) << '\n';
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + out_path);
  }
  return kExitOk;
}

int cmd_experiment(const CommonFlags& flags, std::ostream& out) {
  const ExperimentConfig config = apply_common(flags);
  if (config.theorem == Theorem::kAudit) {
    throw Error(ErrorKind::kConfig, "AUDIT configs run with `grg audit`");
  }
  validate(config);
  const auto start = Clock::now();
  const ExperimentResult result = run_experiment(config);
  const double simulate = seconds_since(start);
  const auto report_start = Clock::now();
  RunManifest manifest = emit_report(result, flags.out, {{"simulate", simulate}});
  manifest.stage_seconds.emplace_back("report", seconds_since(report_start));
  std::ofstream(std::filesystem::path(flags.out) / "manifest.json") << manifest.to_json().dump(2) << '\n';
  for (const auto& p : result.points) {
    out << "n=" << p.n;
    if (p.ks) out << " ks_d=" << p.ks->d_stat << " ks_p=" << p.ks->p_value;
    if (config.theorem == Theorem::kLln) out << " mean=" << p.summary.mean << " target=" << p.target;
    out << '\n';
  }
  out << "wrote " << flags.out << '\n';
  return kExitOk;
}

int cmd_audit(const CommonFlags& flags, std::ostream& out) {
  ExperimentConfig config = apply_common(flags);
  config.theorem = Theorem::kAudit;
  validate(config);
  const auto start = Clock::now();
  const AuditResult result = run_audit(config);
  emit_audit_report(result, flags.out, {{"audit", seconds_since(start)}});
  for (std::size_t k = 0; k < result.trends.size(); ++k) {
    out << "t=" << config.t_values[k] << " all terms strictly decreasing: "
        << (result.trends[k].all_terms() ? "yes" : "no") << '\n';
  }
  out << "wrote " << flags.out << '\n';
  return kExitOk;
}

int cmd_lemma1(const std::string& model_spec, std::vector<double> grid, const std::string& out_dir,
               std::ostream& out) {
  const WeightModel model = parse_model_spec(model_spec);
  const auto tail = tail_params(model);
  if (!tail) throw Error(ErrorKind::kUnsupportedModel, model_name(model) + " has no tail parameters");
  if (grid.empty()) {
    for (double x = 10.0; x <= 1e8; x *= 10.0) {
      if (x > tail->xm) grid.push_back(x);
    }
  }
  const auto rows = lemma1_ratio_check(model, grid);
  std::ostringstream csv;
  write_lemma1_csv(csv, rows);
  if (out_dir.empty()) {
    out << csv.str();
    return kExitOk;
  }
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "lemma1.csv") << csv.str();
  const double a = tail->alpha;
  const json summary = {
      {"schema_version", kSummarySchemaVersion},
      {"model", to_json(model)},
      {"alpha", a},
      {"c", tail->c},
      {"last_ratio_second", rows.back().ratio_second},
      {"last_ratio_tail_karamata", rows.back().ratio_tail_karamata},
      {"printed_constant_discrepancy",
       {{"flagged", true},
        {"printed_constant", "c(2-alpha)/(alpha-1)"},
        {"karamata_constant", "c*alpha/(alpha-1)"},
        {"expected_ratio", a / (2.0 - a)},
        {"observed_ratio", rows.back().ratio_tail_printed}}},
  };
  std::ofstream json_out(dir / "lemma1.json");
  json_out << summary.dump(2) << '\n';
  if (!json_out) throw Error(ErrorKind::kIo, "cannot write " + (dir / "lemma1.json").string());
  out << "wrote " << out_dir << '\n';
  return kExitOk;
}

int cmd_report(const std::string& in_dir, std::string out_dir, std::ostream& out) {
  const std::filesystem::path in(in_dir);
  std::ifstream manifest_in(in / "manifest.json");
  if (!manifest_in) throw Error(ErrorKind::kConfig, "no manifest.json in " + in_dir);
  json manifest;
  try {
    manifest_in >> manifest;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("manifest.json: ") + e.what());
  }
  const ExperimentConfig config = config_from_json(manifest.at("config"));
  std::ifstream csv(in / "result.csv");
  if (!csv) throw Error(ErrorKind::kConfig, "no result.csv in " + in_dir);
  const ExperimentResult result = result_from_csv(config, csv);
  if (out_dir.empty()) out_dir = in_dir;
  const auto start = Clock::now();
  emit_report(result, out_dir, {{"report", seconds_since(start)}});
  out << "wrote " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized random graph simulator and limit-theorem checks", "grg"};
  app.require_subcommand(1);

  std::string model_spec;
  std::size_t n = 0;
  std::optional<std::uint64_t> sample_seed;
  std::string sampler = "fast";
  std::string sample_out;
  std::string edges_path;
  auto* sample = app.add_subcommand("sample", "draw one graph and print a JSON summary");
  sample->add_option("--model", model_spec, "weight model, e.g. pareto:alpha=1.5,xm=1")->required();
  sample->add_option("--n", n, "vertex count")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32));
  sample->add_option("--seed", sample_seed, "seed (overrides GRG_SEED)");
  sample->add_option("--sampler", sampler, "edge sampler")->check(CLI::IsMember({"naive", "fast"}));
  sample->add_option("--out", sample_out, "write the JSON summary here instead of stdout");
  sample->add_option("--edges", edges_path, "also dump the edge list (\"i j\" per line)");

  CommonFlags experiment_flags;
  auto* experiment = app.add_subcommand("experiment", "run a T1, T2 or LLN experiment");
  add_common(experiment, experiment_flags, "grg_out");

  CommonFlags audit_flags;
  auto* audit = app.add_subcommand("audit", "evaluate the remainder terms across n_grid");
  add_common(audit, audit_flags, "grg_audit");

  std::string lemma_model;
  std::vector<double> lemma_grid;
  std::string lemma_out;
  auto* lemma1 = app.add_subcommand("lemma1", "truncated moments vs their regular-variation asymptotes");
  lemma1->add_option("--model", lemma_model, "heavy-tailed weight model")->required();
  lemma1->add_option("--x", lemma_grid, "truncation points (default: decades 10..1e8)")->delimiter(',');
  lemma1->add_option("--out", lemma_out, "output directory (default: CSV on stdout)");

  std::string report_in;
  std::string report_out;
  auto* report = app.add_subcommand("report", "rebuild summary and plots from a run directory");
  report->add_option("--in", report_in, "directory written by `grg experiment`")->required();
  report->add_option("--out", report_out, "output directory (default: --in)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*sample) return cmd_sample(model_spec, n, sample_seed, sampler, sample_out, edges_path, out);
    if (*experiment) return cmd_experiment(experiment_flags, out);
    if (*audit) return cmd_audit(audit_flags, out);
    if (*lemma1) return cmd_lemma1(lemma_model, lemma_grid, lemma_out, out);
    if (*report) return cmd_report(report_in, report_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_config_error() ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace grg
