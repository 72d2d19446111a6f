#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "grg/limits.hpp"
#include "grg/weights.hpp"

namespace grg {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kResultCsvHeader = "n,replication,statistic,edge_count,L_n";

/// What a run wrote and how long each stage took. Timings live only here so
/// the other outputs stay byte-identical across re-runs.
struct RunManifest {
  nlohmann::json config;
  std::string version;
  std::uint64_t master_seed = 0;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::filesystem::path> files;

  nlohmann::json to_json() const;
};

const char* artifact_version();

/// One row per (n, replication): n,replication,statistic,edge_count,L_n.
void write_result_csv(std::ostream& os, const ExperimentResult& result);

/// Rebuilds an ExperimentResult (KS tests included) from a config and the
/// rows of a result.csv. Used by `grg report`.
ExperimentResult result_from_csv(const ExperimentConfig& config, std::istream& csv);

nlohmann::json summary_json(const ExperimentResult& result);

/// Histogram of the normalized statistic. T1 overlays the standard normal
/// density, T2 overlays the weight-sum statistic's histogram, LLN marks EW/2.
std::string histogram_svg(const StatisticPoint& point, Theorem theorem);

/// Quantile-quantile plot of the edge statistic against the weight-sum
/// statistic (T2 points only).
std::string qq_svg(const StatisticPoint& point);

/// Writes result.csv, summary.json, hist_<n>.svg (qq_<n>.svg for T2) and
/// manifest.json into out_dir. Throws kConfig for an empty result before
/// touching the filesystem, kIo on write failures.
RunManifest emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir,
                        std::vector<std::pair<std::string, double>> stage_seconds = {});

void write_audit_csv(std::ostream& os, const AuditResult& result);
nlohmann::json audit_summary_json(const AuditResult& result);

/// audit.csv (per replication), audit_summary.json and manifest.json.
RunManifest emit_audit_report(const AuditResult& result, const std::filesystem::path& out_dir,
                              std::vector<std::pair<std::string, double>> stage_seconds = {});

void write_lemma1_csv(std::ostream& os, const std::vector<Lemma1Ratios>& rows);

}  // namespace grg
