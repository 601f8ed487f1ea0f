// parlscan: collect, normalize and analyze parliamentary committee
// protocols. Subcommands mirror the pipeline stages; every stage reads
// and writes plain files under --out-dir so runs can be repeated,
// diffed and resumed stage by stage.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parlscan/parlscan.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = "out";
  unsigned long long seed = 0;  // reserved for randomized tooling; the
                                // pipeline itself is deterministic
};

parlscan::AnalyzeOptions g_analyze;
std::string g_committees = "top10";
std::string g_features = "all";
std::string g_resolution = "6m";
std::string g_algorithms = "pelt,dynp";
double g_penalty = -1.0;  // <0 means per-series default
std::string g_labels_path;
std::string g_detections_path;
int g_tolerance = 0;

void apply_analyze_flags() {
  using namespace parlscan;
  if (g_committees.rfind("top", 0) == 0) {
    auto k = parse_int(g_committees.substr(3));
    if (!k || *k < 1) throw ConfigError("--committees: bad topK value " + g_committees);
    g_analyze.top_k = static_cast<int>(*k);
    g_analyze.committee_ids.clear();
  } else {
    g_analyze.committee_ids.clear();
    for (auto& id : split(g_committees, ','))
      if (!trim(id).empty()) g_analyze.committee_ids.push_back(trim(id));
    if (g_analyze.committee_ids.empty())
      throw ConfigError("--committees: no committee ids given");
  }

  g_analyze.kinds.clear();
  if (g_features == "all") {
    g_analyze.kinds.assign(kAllFeatureKinds.begin(), kAllFeatureKinds.end());
  } else {
    for (auto& name : split(g_features, ',')) {
      auto kind = feature_kind_from_id(trim(name));
      if (!kind) throw ConfigError("--features: unknown feature " + name);
      g_analyze.kinds.push_back(*kind);
    }
  }

  auto resolution = resolution_from_id(g_resolution);
  if (!resolution) throw ConfigError("--resolution: expected 1m, 3m or 6m");
  g_analyze.resolution = *resolution;

  g_analyze.algorithms.clear();
  if (g_algorithms == "all") {
    g_analyze.algorithms = {CpdAlgorithm::Pelt, CpdAlgorithm::Binseg,
                            CpdAlgorithm::Window, CpdAlgorithm::Dynp};
  } else {
    for (auto& name : split(g_algorithms, ',')) {
      auto algo = cpd_algorithm_from_id(trim(name));
      if (!algo) throw ConfigError("--algorithms: unknown algorithm " + name);
      g_analyze.algorithms.push_back(*algo);
    }
  }
  if (g_penalty >= 0.0) g_analyze.penalty = g_penalty;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int do_ingest(const GlobalOptions& g) {
  auto cfg = parlscan::load_config(g.config_path);
  auto summary = parlscan::run_ingest(cfg, g.out_dir);
  print_warnings(summary.warnings);
  for (const auto& [source, count] : summary.per_source)
    std::printf("staged %s: %zu documents\n", source.c_str(), count);
  std::printf("patches applied: %zu\n", summary.patches_applied);
  for (const auto& p : summary.patches_unapplied)
    std::printf("patch not applied (no such document): %s/%s (%s)\n", p.source_id.c_str(),
                p.native_id.c_str(), p.reason.c_str());
  return kExitOk;
}

int do_parse(const GlobalOptions& g) {
  auto cfg = parlscan::load_config(g.config_path);
  auto summary = parlscan::run_parse(cfg, g.out_dir);
  print_warnings(summary.warnings);
  std::printf("parsed %zu records, %zu failures\n", summary.n_records, summary.n_failures);
  return kExitOk;
}

int do_analyze(const GlobalOptions& g) {
  apply_analyze_flags();
  auto summary = parlscan::run_analyze(g.out_dir, g_analyze);
  print_warnings(summary.warnings);
  std::printf("series: %zu, outlier hits: %zu, change points: %zu\n", summary.n_series,
              summary.n_outlier_hits, summary.n_change_points);
  return kExitOk;
}

int do_evaluate(const GlobalOptions& g) {
  const std::string detections =
      g_detections_path.empty() ? g.out_dir + "/cpd.csv" : g_detections_path;
  auto out = parlscan::run_evaluate(detections, g_labels_path, g.out_dir, g_tolerance);
  std::printf("%s", parlscan::report_to_table(out.report).c_str());
  return kExitOk;
}

int do_stats(const GlobalOptions& g) {
  auto stats = parlscan::run_stats(g.out_dir);
  std::printf("country  committees  protocols  period                   mean    median\n");
  for (const auto& s : stats)
    std::printf("%-7s  %10lld  %9lld  %s..%s  %6.1f  %8.1f\n", s.country.c_str(),
                static_cast<long long>(s.n_committees),
                static_cast<long long>(s.n_protocols), s.period_start.iso().c_str(),
                s.period_end.iso().c_str(), s.mean_protocols_per_committee,
                s.median_protocols_per_committee);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collect and analyze parliamentary committee protocols"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "pipeline configuration file");
  app.add_option("--out-dir", g.out_dir, "output directory (default: out)");
  app.add_option("--seed", g.seed, "seed for randomized tooling");

  auto* ingest = app.add_subcommand("ingest", "load sources into the staging store");
  auto* parse = app.add_subcommand("parse", "parse staged documents into records.jsonl");
  auto* analyze =
      app.add_subcommand("analyze", "build series, detect outliers and change points");
  auto* evaluate = app.add_subcommand("evaluate", "score detections against labels");
  auto* stats = app.add_subcommand("stats", "per-country corpus statistics");

  analyze->add_option("--committees", g_committees, "topK (e.g. top10) or id,id,...");
  analyze->add_option("--features", g_features,
                      "all or list of meetings_count,avg_committee_members,avg_text_length");
  analyze->add_option("--resolution", g_resolution, "1m, 3m or 6m");
  analyze->add_option("--algorithms", g_algorithms, "all or list of pelt,binseg,window,dynp");
  analyze->add_option("--penalty", g_penalty, "PELT penalty (default: per-series estimate)");
  analyze->add_option("--n-bkps", g_analyze.n_bkps, "breakpoints for dynp/binseg/window");
  analyze->add_option("--min-size", g_analyze.min_size, "minimum segment length");
  analyze->add_option("--window", g_analyze.half_width, "window half-width");

  evaluate->add_option("--labels", g_labels_path, "label CSV file")->required();
  evaluate->add_option("--detections", g_detections_path,
                       "detections CSV (default: <out-dir>/cpd.csv)");
  evaluate->add_option("--tolerance", g_tolerance, "matching tolerance in buckets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed() || parse->parsed()) {
      if (g.config_path.empty()) {
        std::fprintf(stderr, "error: --config is required for this subcommand\n");
        return kExitUsage;
      }
    }
    if (ingest->parsed()) return do_ingest(g);
    if (parse->parsed()) return do_parse(g);
    if (analyze->parsed()) return do_analyze(g);
    if (evaluate->parsed()) return do_evaluate(g);
    if (stats->parsed()) return do_stats(g);
  } catch (const parlscan::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const parlscan::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const parlscan::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
