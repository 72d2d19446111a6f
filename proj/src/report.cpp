#include "grg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "grg/config.hpp"
#include "grg/error.hpp"

#ifndef GRG_VERSION
#define GRG_VERSION "dev"
#endif

namespace grg {
namespace {

using nlohmann::json;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

json ks_json(const std::optional<KsResult>& ks) {
  if (!ks) return nullptr;
  return {{"d", ks->d_stat}, {"p", ks->p_value}, {"n_effective", ks->n_effective}};
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  written.push_back(path);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "cannot create output directory " + dir.string());
  }
}

// Minimal fixed-layout SVG plot: data coordinates map into a 640x420 canvas.
class SvgPlot {
 public:
  SvgPlot(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) y1_ = y0_ + 1.0;
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void rect(double xa, double xb, double ya, double yb, const char* fill) {
    body_ << "<rect x=\"" << fmt("%.2f", px(xa)) << "\" y=\"" << fmt("%.2f", py(yb)) << "\" width=\""
          << fmt("%.2f", px(xb) - px(xa)) << "\" height=\"" << fmt("%.2f", py(ya) - py(yb))
          << "\" fill=\"" << fill << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y)) << ' ';
    body_ << "\"/>\n";
  }

  void circle(double x, double y, const char* fill) {
    body_ << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y))
          << "\" r=\"1.5\" fill=\"" << fill << "\"/>\n";
  }

  std::string render(const std::string& title, const std::string& xlabel, const std::string& ylabel) const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    os << body_.str();
    const double xa = px(x0_), xb = px(x1_), ya = py(y0_), yb = py(y1_);
    os << "<line x1=\"" << fmt("%.2f", xa) << "\" y1=\"" << fmt("%.2f", ya) << "\" x2=\"" << fmt("%.2f", xb)
       << "\" y2=\"" << fmt("%.2f", ya) << "\" stroke=\"#000000\"/>\n";
    os << "<line x1=\"" << fmt("%.2f", xa) << "\" y1=\"" << fmt("%.2f", ya) << "\" x2=\"" << fmt("%.2f", xa)
       << "\" y2=\"" << fmt("%.2f", yb) << "\" stroke=\"#000000\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
      os << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << fmt("%.2f", y) << "\" text-anchor=\"" << anchor
         << "\">" << text << "</text>\n";
    };
    label(xa, ya + 16, fmt("%.3g", x0_), "start");
    label(xb, ya + 16, fmt("%.3g", x1_), "end");
    label(xa - 6, ya, fmt("%.3g", y0_), "end");
    label(xa - 6, yb + 10, fmt("%.3g", y1_), "end");
    label((xa + xb) / 2, kHeight - 8, xlabel, "middle");
    os << "<text x=\"14\" y=\"" << fmt("%.2f", (ya + yb) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << fmt("%.2f", (ya + yb) / 2) << ")\">" << ylabel << "</text>\n";
    os << "</svg>\n";
    return os.str();
  }

 private:
  static constexpr int kWidth = 640;
  static constexpr int kHeight = 420;
  static constexpr double kLeft = 60, kRight = 20, kTop = 34, kBottom = 44;
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (pos - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<double> density;
};

Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / static_cast<double>(bins);
  if (!(h.width > 0.0)) h.width = 1.0;
  h.density.assign(bins, 0.0);
  for (double v : values) {
    const double pos = (v - lo) / h.width;
    if (pos < 0.0 || pos >= static_cast<double>(bins)) continue;
    h.density[static_cast<std::size_t>(pos)] += 1.0;
  }
  for (double& d : h.density) d /= static_cast<double>(values.size()) * h.width;
  return h;
}

void require_nonempty(const ExperimentResult& result) {
  if (result.points.empty()) throw Error(ErrorKind::kConfig, "experiment produced no points");
  for (const auto& p : result.points) {
    if (p.edge.values.empty()) throw Error(ErrorKind::kConfig, "empty replication set at n = " + std::to_string(p.n));
  }
}

}  // namespace

const char* artifact_version() { return GRG_VERSION; }

json RunManifest::to_json() const {
  json stages = json::array();
  for (const auto& [name, seconds] : stage_seconds) stages.push_back({{"stage", name}, {"seconds", seconds}});
  json out = json::array();
  for (const auto& f : files) out.push_back(f.string());
  return {{"config", config},       {"version", version}, {"master_seed", master_seed},
          {"stages", stages},       {"files", out}};
}

void write_result_csv(std::ostream& os, const ExperimentResult& result) {
  os << kResultCsvHeader << '\n';
  for (const auto& p : result.points) {
    for (std::size_t r = 0; r < p.edge.values.size(); ++r) {
      os << p.n << ',' << r << ',' << num(p.edge.values[r]) << ',' << p.edge.edge_counts[r] << ','
         << num(p.edge.total_weights[r]) << '\n';
    }
  }
}

ExperimentResult result_from_csv(const ExperimentConfig& config, std::istream& csv) {
  std::string line;
  if (!std::getline(csv, line) || line != kResultCsvHeader) {
    throw Error(ErrorKind::kConfig, "result.csv header must be '" + std::string(kResultCsvHeader) + "'");
  }
  std::map<std::size_t, StatisticPoint> by_n;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell[5];
    for (auto& c : cell) {
      if (!std::getline(row, c, ',')) throw Error(ErrorKind::kConfig, "malformed result.csv row: " + line);
    }
    try {
      const std::size_t n = std::stoull(cell[0]);
      auto& p = by_n[n];
      p.n = n;
      p.edge.n = n;
      p.edge.values.push_back(std::stod(cell[2]));
      p.edge.edge_counts.push_back(std::stoull(cell[3]));
      p.edge.total_weights.push_back(std::stod(cell[4]));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kConfig, "malformed result.csv row: " + line);
    }
  }
  ExperimentResult result{config, {}, {}};
  for (std::size_t n : config.n_grid) {
    const auto it = by_n.find(n);
    if (it == by_n.end()) throw Error(ErrorKind::kConfig, "result.csv has no rows for n = " + std::to_string(n));
    StatisticPoint p = std::move(it->second);
    const double nd = static_cast<double>(n);
    const Moments m = analytic_moments(config.model, n);
    switch (config.theorem) {
      case Theorem::kGaussian:
        p.edge.norming = {nd * m.mean, std::sqrt(nd * (2.0 * m.mean + m.variance))};
        p.ks = ks_one_sample(p.edge.values, normal_cdf);
        break;
      case Theorem::kStable: {
        const double a_n = compute_norming(config.model, n);
        p.edge.norming = {nd * m.mean, a_n};
        std::vector<double> ws;
        for (double total : p.edge.total_weights) ws.push_back((total - nd * m.mean) / a_n);
        p.ks = ks_two_sample(p.edge.values, ws);
        p.weight_sum = std::move(ws);
        break;
      }
      case Theorem::kLln:
        p.edge.norming = {0.0, 2.0 * nd};
        p.target = m.mean / 2.0;
        break;
      case Theorem::kAudit:
        throw Error(ErrorKind::kConfig, "audit runs have no result.csv");
    }
    p.summary = summarize(p.edge.values);
    result.points.push_back(std::move(p));
  }
  if (config.theorem != Theorem::kLln) {
    TrendVerdict v;
    for (std::size_t k = 1; k < result.points.size(); ++k) {
      if (result.points[k].ks->d_stat > result.points[k - 1].ks->d_stat) v.non_increasing = false;
    }
    v.last_below_first =
        result.points.size() > 1 && result.points.back().ks->d_stat < result.points.front().ks->d_stat;
    result.trend = v;
  }
  return result;
}

json summary_json(const ExperimentResult& result) {
  json points = json::array();
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const auto& p = result.points[k];
    std::string trend = "first";
    if (k > 0 && p.ks && result.points[k - 1].ks) {
      trend = p.ks->d_stat < result.points[k - 1].ks->d_stat ? "decreased" : "not_decreased";
    }
    json entry = {
        {"n", p.n},
        {"replications", p.edge.values.size()},
        {"ks_d", p.ks ? json(p.ks->d_stat) : json(nullptr)},
        {"ks_p", p.ks ? json(p.ks->p_value) : json(nullptr)},
        {"ks", ks_json(p.ks)},
        {"trend", p.ks ? json(trend) : json(nullptr)},
        {"norming", {{"center", p.edge.norming.center}, {"scale", p.edge.norming.scale}}},
        {"mean", p.summary.mean},
        {"variance", p.summary.variance},
        {"median", p.summary.median},
        {"min", p.summary.min},
        {"max", p.summary.max},
    };
    if (result.config.theorem == Theorem::kLln) {
      entry["target"] = p.target;
      entry["deviation"] = p.summary.mean - p.target;
      entry["sd"] = std::sqrt(p.summary.variance);
    }
    if (p.weight_sum) {
      const Summary ws = summarize(*p.weight_sum);
      entry["weight_sum"] = {{"mean", ws.mean}, {"median", ws.median}, {"variance", ws.variance}};
    }
    points.push_back(entry);
  }
  json out = {
      {"schema_version", kSummarySchemaVersion},
      {"theorem", to_string(result.config.theorem)},
      {"model", model_name(result.config.model)},
      {"config", to_json(result.config)},
      {"points", points},
  };
  if (result.trend) {
    out["trend"] = {{"non_increasing", result.trend->non_increasing},
                    {"last_below_first", result.trend->last_below_first}};
  } else {
    out["trend"] = nullptr;
  }
  return out;
}

std::string histogram_svg(const StatisticPoint& point, Theorem theorem) {
  std::vector<double> sorted = point.edge.values;
  std::sort(sorted.begin(), sorted.end());
  double lo = quantile_sorted(sorted, 0.005);
  double hi = quantile_sorted(sorted, 0.995);
  if (point.weight_sum) {
    std::vector<double> ws = *point.weight_sum;
    std::sort(ws.begin(), ws.end());
    lo = std::min(lo, quantile_sorted(ws, 0.005));
    hi = std::max(hi, quantile_sorted(ws, 0.995));
  }
  if (theorem == Theorem::kGaussian) {
    lo = std::min(lo, -3.5);
    hi = std::max(hi, 3.5);
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  constexpr std::size_t kBins = 40;
  const Histogram h = histogram(point.edge.values, lo, hi, kBins);
  double ymax = *std::max_element(h.density.begin(), h.density.end());

  std::vector<std::pair<double, double>> overlay;
  if (theorem == Theorem::kGaussian) {
    for (int k = 0; k <= 200; ++k) {
      const double x = lo + (hi - lo) * k / 200.0;
      overlay.emplace_back(x, normal_pdf(x));
    }
  } else if (theorem == Theorem::kStable && point.weight_sum) {
    const Histogram wh = histogram(*point.weight_sum, lo, hi, kBins);
    for (std::size_t b = 0; b < kBins; ++b) overlay.emplace_back(lo + (b + 0.5) * wh.width, wh.density[b]);
  }
  for (const auto& [x, y] : overlay) ymax = std::max(ymax, y);

  SvgPlot plot(lo, hi, 0.0, ymax * 1.1);
  for (std::size_t b = 0; b < kBins; ++b) {
    plot.rect(lo + b * h.width, lo + (b + 1) * h.width, 0.0, h.density[b], "#8fb3d9");
  }
  if (!overlay.empty()) plot.polyline(overlay, "#c0392b");
  if (theorem == Theorem::kLln) plot.polyline({{point.target, 0.0}, {point.target, ymax * 1.05}}, "#c0392b");

  std::string title = "n = " + std::to_string(point.n);
  std::string xlabel = "normalized edge count";
  switch (theorem) {
    case Theorem::kGaussian: title += ": (2E_n - nEW)/sqrt(n(2EW+VarW)) with N(0,1) density"; break;
    case Theorem::kStable: title += ": edge statistic (bars) vs weight-sum statistic (line)"; break;
    case Theorem::kLln:
      title += ": E_n/n, line at EW/2";
      xlabel = "E_n / n";
      break;
    case Theorem::kAudit: break;
  }
  return plot.render(title, xlabel, "density");
}

std::string qq_svg(const StatisticPoint& point) {
  if (!point.weight_sum) throw Error(ErrorKind::kConfig, "QQ plot needs the weight-sum statistic");
  std::vector<double> a = point.edge.values;
  std::vector<double> b = *point.weight_sum;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::pair<double, double>> pts;
  for (int k = 1; k < 200; ++k) {
    const double q = k / 200.0;
    pts.emplace_back(quantile_sorted(b, q), quantile_sorted(a, q));
  }
  double lo = std::min(pts.front().first, pts.front().second);
  double hi = std::max(pts.back().first, pts.back().second);
  SvgPlot plot(lo, hi, lo, hi);
  plot.polyline({{lo, lo}, {hi, hi}}, "#7f8c8d");
  for (const auto& [x, y] : pts) plot.circle(x, y, "#2c3e50");
  return plot.render("n = " + std::to_string(point.n) + ": QQ of edge vs weight-sum statistic",
                     "weight-sum quantile", "edge-statistic quantile");
}

RunManifest emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir,
                        std::vector<std::pair<std::string, double>> stage_seconds) {
  require_nonempty(result);
  ensure_dir(out_dir);
  RunManifest manifest;
  manifest.config = to_json(result.config);
  manifest.version = artifact_version();
  manifest.master_seed = result.config.master_seed;
  manifest.stage_seconds = std::move(stage_seconds);

  std::ostringstream csv;
  write_result_csv(csv, result);
  write_file(out_dir / "result.csv", csv.str(), manifest.files);
  write_file(out_dir / "summary.json", summary_json(result).dump(2) + "\n", manifest.files);
  for (const auto& p : result.points) {
    write_file(out_dir / ("hist_" + std::to_string(p.n) + ".svg"), histogram_svg(p, result.config.theorem),
               manifest.files);
    if (p.weight_sum) write_file(out_dir / ("qq_" + std::to_string(p.n) + ".svg"), qq_svg(p), manifest.files);
  }
  manifest.files.push_back(out_dir / "manifest.json");
  std::vector<std::filesystem::path> ignored;
  write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n", ignored);
  return manifest;
}

void write_audit_csv(std::ostream& os, const AuditResult& result) {
  os << "n,replication,seed,t,selfloop_bound,i1_bound,i3_bound,T_a,T_b,T_c,T_d\n";
  for (const auto& r : result.rows) {
    os << r.n << ',' << r.replication << ',' << r.seed << ',' << num(r.t) << ',' << num(r.terms.selfloop_bound)
       << ',' << num(r.terms.i1_bound) << ',' << num(r.terms.i3_bound) << ',' << num(r.terms.t_a) << ','
       << num(r.terms.t_b) << ',' << num(r.terms.t_c) << ',' << num(r.terms.t_d) << '\n';
  }
}

json audit_summary_json(const AuditResult& result) {
  auto terms = [](const AuditTerms& t) {
    return json{{"selfloop_bound", t.selfloop_bound}, {"i1_bound", t.i1_bound}, {"i3_bound", t.i3_bound},
                {"T_a", t.t_a}, {"T_b", t.t_b}, {"T_c", t.t_c}, {"T_d", t.t_d}};
  };
  auto pair = [](const PairMoments& p) {
    return json{{"bounded_product", p.bounded_product}, {"tail_product", p.tail_product}};
  };
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({
        {"n", p.n},
        {"t", p.t},
        {"c_n", p.norming.c_n},
        {"a_n", p.norming.a_n},
        {"medians", terms(p.medians)},
        {"pair_moments_mc", pair(p.pair_mc)},
        {"pair_moments_exact", p.pair_exact ? pair(*p.pair_exact) : json(nullptr)},
    });
  }
  json trends = json::array();
  for (std::size_t k = 0; k < result.trends.size(); ++k) {
    const auto& tr = result.trends[k];
    auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
    trends.push_back({{"t", result.config.t_values[k]},
                      {"selfloop_bound", tr.selfloop_bound},
                      {"i1_bound", tr.i1_bound},
                      {"i3_bound", tr.i3_bound},
                      {"T_a", tr.t_a},
                      {"T_b", tr.t_b},
                      {"T_c", tr.t_c},
                      {"T_d", tr.t_d},
                      {"pair_bounded_mc", tr.pair_bounded_mc},
                      {"pair_tail_mc", tr.pair_tail_mc},
                      {"pair_bounded_exact", opt(tr.pair_bounded_exact)},
                      {"pair_tail_exact", opt(tr.pair_tail_exact)},
                      {"all_terms_decreasing", tr.all_terms()}});
  }
  return {{"schema_version", kSummarySchemaVersion},
          {"theorem", "AUDIT"},
          {"model", model_name(result.config.model)},
          {"config", to_json(result.config)},
          {"remainder_coefficient_bound", AuditTerms::kRemainderCoefficient},
          {"points", points},
          {"trend", trends}};
}

RunManifest emit_audit_report(const AuditResult& result, const std::filesystem::path& out_dir,
                              std::vector<std::pair<std::string, double>> stage_seconds) {
  if (result.rows.empty()) throw Error(ErrorKind::kConfig, "audit produced no rows");
  ensure_dir(out_dir);
  RunManifest manifest;
  manifest.config = to_json(result.config);
  manifest.version = artifact_version();
  manifest.master_seed = result.config.master_seed;
  manifest.stage_seconds = std::move(stage_seconds);
  std::ostringstream csv;
  write_audit_csv(csv, result);
  write_file(out_dir / "audit.csv", csv.str(), manifest.files);
  write_file(out_dir / "audit_summary.json", audit_summary_json(result).dump(2) + "\n", manifest.files);
  manifest.files.push_back(out_dir / "manifest.json");
  std::vector<std::filesystem::path> ignored;
  write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n", ignored);
  return manifest;
}

void write_lemma1_csv(std::ostream& os, const std::vector<Lemma1Ratios>& rows) {
  os << "x,second_moment,tail_moment,ratio_second,ratio_tail_karamata,ratio_tail_printed\n";
  for (const auto& r : rows) {
    os << num(r.x) << ',' << num(r.second_moment) << ',' << num(r.tail_moment) << ',' << num(r.ratio_second) << ','
       << num(r.ratio_tail_karamata) << ',' << num(r.ratio_tail_printed) << '\n';
  }
}

}  // namespace grg
