#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "parlscan/changepoint.hpp"
#include "parlscan/config.hpp"
#include "parlscan/csv.hpp"
#include "parlscan/evaluate.hpp"
#include "parlscan/features.hpp"
#include "parlscan/ingest.hpp"
#include "parlscan/model.hpp"
#include "parlscan/outliers.hpp"
#include "parlscan/parse.hpp"

namespace parlscan {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

inline std::string sanitize_filename(std::string_view raw) {
  std::string out;
  for (char c : raw)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ingest: sources -> staging store (+ manual patches)
// ---------------------------------------------------------------------------

struct IngestSummary {
  std::vector<std::pair<std::string, size_t>> per_source;  // source_id, doc count
  std::vector<std::string> warnings;
  size_t patches_applied = 0;
  std::vector<PatchEntry> patches_unapplied;
};

inline IngestSummary run_ingest(const PipelineConfig& cfg, const std::string& out_dir) {
  IngestSummary summary;
  std::vector<RawDocument> all;
  for (const auto& source : cfg.sources) {
    LoadResult loaded = load_source(source);
    summary.per_source.emplace_back(source.source_id, loaded.documents.size());
    for (auto& w : loaded.warnings) summary.warnings.push_back(std::move(w));
    for (auto& d : loaded.documents) all.push_back(std::move(d));
  }
  std::vector<PatchEntry> patches;
  if (cfg.patches_path) patches = load_patches_csv(*cfg.patches_path);
  PatchOutcome patched = apply_patches(std::move(all), patches);
  summary.patches_applied = patched.applied;
  summary.patches_unapplied = patched.unapplied;
  write_staging(patched.documents, (std::filesystem::path(out_dir) / "staging").string());
  return summary;
}

// ---------------------------------------------------------------------------
// parse: staging -> records.jsonl + failures.csv
// ---------------------------------------------------------------------------

struct ParseSummary {
  size_t n_records = 0;
  size_t n_failures = 0;
  std::vector<std::string> warnings;
};

inline ParseSummary run_parse(const PipelineConfig& cfg, const std::string& out_dir) {
  const auto staging = (std::filesystem::path(out_dir) / "staging").string();
  std::vector<RawDocument> docs = read_staging(staging);

  std::map<std::string, const SourceDescriptor*> descriptors;
  for (const auto& s : cfg.sources) descriptors[s.source_id] = &s;

  std::vector<ProtocolRecord> records;
  std::vector<ParseFailure> failures;
  for (const auto& doc : docs) {
    auto it = descriptors.find(doc.source_id);
    if (it == descriptors.end())
      throw ConfigError("staged documents of unknown source " + doc.source_id);
    auto result = parse_document(doc, *it->second);
    if (std::holds_alternative<ProtocolRecord>(result))
      records.push_back(std::get<ProtocolRecord>(std::move(result)));
    else
      failures.push_back(std::get<ParseFailure>(std::move(result)));
  }

  ParseSummary summary;
  summary.n_records = records.size();
  summary.n_failures = failures.size();
  for (const auto& v : validate_corpus(records))
    summary.warnings.push_back("corpus invariant: " + v.field + " " + v.rule);

  write_records_jsonl(records, (std::filesystem::path(out_dir) / "records.jsonl").string());
  std::string failures_csv = "source_id,native_id,missing_fields\n";
  for (const auto& f : failures)
    failures_csv += csv_row({f.source_id, f.native_id, join(f.missing_fields, ";")});
  detail::write_text_file((std::filesystem::path(out_dir) / "failures.csv").string(),
                          failures_csv);
  return summary;
}

// ---------------------------------------------------------------------------
// analyze: records.jsonl -> series/*.csv + outliers.csv + cpd.csv
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  int top_k = 10;                          // used when committee_ids is empty
  std::vector<std::string> committee_ids;  // explicit selection overrides top_k
  std::vector<FeatureKind> kinds = {FeatureKind::MeetingsCount,
                                    FeatureKind::AvgCommitteeMembers,
                                    FeatureKind::AvgTextLength};
  Resolution resolution = Resolution::SixMonths;
  std::vector<CpdAlgorithm> algorithms = {CpdAlgorithm::Pelt, CpdAlgorithm::Dynp};
  std::optional<double> penalty;  // PELT; unset -> default_penalty per series
  int n_bkps = 5;
  int min_size = 2;
  int half_width = 4;
};

struct AnalyzeSummary {
  size_t n_series = 0;
  size_t n_outlier_hits = 0;
  size_t n_change_points = 0;
  std::vector<std::string> warnings;
};

inline std::vector<std::string> select_committees(const std::vector<ProtocolRecord>& records,
                                                  const AnalyzeOptions& options) {
  if (!options.committee_ids.empty()) return options.committee_ids;
  std::set<std::string> countries;
  for (const auto& r : records) countries.insert(r.country);
  std::vector<std::string> out;
  for (const auto& country : countries)
    for (const auto& [committee, count] : top_k_committees(records, country, options.top_k))
      out.push_back(committee);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline CpdResult run_algorithm(const CommitteeSeries& series, CpdAlgorithm algorithm,
                               const AnalyzeOptions& options) {
  switch (algorithm) {
    case CpdAlgorithm::Pelt: {
      const double pen = options.penalty ? *options.penalty : default_penalty(series.values);
      return pelt(series, pen, options.min_size);
    }
    case CpdAlgorithm::Binseg:
      return binseg(series, options.n_bkps, options.min_size);
    case CpdAlgorithm::Window:
      return window_sliding(series, options.half_width, options.n_bkps, options.min_size);
    case CpdAlgorithm::Dynp:
      return dynp(series, options.n_bkps, options.min_size);
  }
  throw std::invalid_argument("unknown algorithm");
}

inline AnalyzeSummary run_analyze(const std::string& out_dir, const AnalyzeOptions& options) {
  namespace fs = std::filesystem;
  const auto records = read_records_jsonl((fs::path(out_dir) / "records.jsonl").string());
  if (records.empty()) throw DataError("records.jsonl is empty; run parse first");

  AnalyzeSummary summary;
  const auto committees = select_committees(records, options);

  std::string outliers_csv = "committee_id,feature,subject,value,side,lower,upper\n";
  std::string cpd_csv =
      "committee_id,feature,resolution,algorithm,change_point_index,bucket_start_date,params\n";

  for (const auto& committee : committees) {
    for (FeatureKind kind : options.kinds) {
      OutlierScan scan = detect_outliers(records, committee, kind);
      if (scan.too_few_values) {
        summary.warnings.push_back(committee + "/" + feature_kind_id(kind) +
                                   ": fewer than 4 values, outlier scan skipped");
      } else {
        for (const auto& hit : scan.hits)
          outliers_csv += csv_row(
              {hit.committee_id, feature_kind_id(hit.kind), hit.subject,
               format_double(hit.value),
               hit.side == OutlierHit::Side::Below ? "below" : "above",
               format_double(scan.bounds->lower), format_double(scan.bounds->upper)});
        summary.n_outlier_hits += scan.hits.size();
      }

      CommitteeSeries series;
      try {
        series = build_series(records, committee, kind, options.resolution);
      } catch (const DataError& e) {
        summary.warnings.push_back(e.what());
        continue;
      }
      ++summary.n_series;

      std::string series_csv = "bucket_start,value\n";
      for (size_t i = 0; i < series.values.size(); ++i)
        series_csv += csv_row({series.bucket_date(static_cast<int>(i)).iso(),
                               format_double(series.values[i])});
      const auto path = fs::path(out_dir) / "series" /
                        (detail::sanitize_filename(committee) + "__" +
                         feature_kind_id(kind) + ".csv");
      detail::write_text_file(path.string(), series_csv);

      for (CpdAlgorithm algorithm : options.algorithms) {
        CpdResult result;
        try {
          result = run_algorithm(series, algorithm, options);
        } catch (const std::invalid_argument& e) {
          summary.warnings.push_back(committee + "/" + feature_kind_id(kind) + "/" +
                                     cpd_algorithm_id(algorithm) + ": " + e.what());
          continue;
        }
        std::vector<std::string> param_parts;
        for (const auto& [k, v] : result.params) param_parts.push_back(k + "=" + v);
        for (int index : result.change_points)
          cpd_csv += csv_row({committee, feature_kind_id(kind),
                              resolution_id(options.resolution), cpd_algorithm_id(algorithm),
                              std::to_string(index), result.bucket_date(index).iso(),
                              join(param_parts, ";")});
        summary.n_change_points += result.change_points.size();
      }
    }
  }
  detail::write_text_file((fs::path(out_dir) / "outliers.csv").string(), outliers_csv);
  detail::write_text_file((fs::path(out_dir) / "cpd.csv").string(), cpd_csv);
  return summary;
}

// ---------------------------------------------------------------------------
// evaluate: cpd.csv + labels.csv -> report.csv + report.txt
// ---------------------------------------------------------------------------

// Rebuilds per-series detection lists from a cpd.csv. Series that
// produced no change points have no rows there, hence no report row.
inline std::vector<CpdResult> load_detections_csv(const std::string& path) {
  const auto rows = read_csv_file(path);
  const std::vector<std::string> expected = {
      "committee_id", "feature",           "resolution", "algorithm",
      "change_point_index", "bucket_start_date", "params"};
  if (rows.empty() || rows.front() != expected)
    throw ConfigError("detections file " + path + ": unexpected header");

  std::map<std::vector<std::string>, CpdResult> grouped;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != expected.size())
      throw DataError(path + ": row " + std::to_string(i + 1) + " malformed");
    auto kind = feature_kind_from_id(row[1]);
    if (!kind) throw DataError(path + ": unknown feature " + row[1]);
    auto resolution = resolution_from_id(row[2]);
    if (!resolution) throw DataError(path + ": unknown resolution " + row[2]);
    auto algorithm = cpd_algorithm_from_id(row[3]);
    if (!algorithm) throw DataError(path + ": unknown algorithm " + row[3]);
    auto index = parse_int(row[4]);
    auto date = parse_iso_date(row[5]);
    if (!index || !date) throw DataError(path + ": row " + std::to_string(i + 1) + " malformed");

    const std::vector<std::string> key = {row[0], row[1], row[2], row[3]};
    auto [it, fresh] = grouped.try_emplace(key);
    CpdResult& r = it->second;
    if (fresh) {
      r.algorithm = *algorithm;
      r.committee_id = row[0];
      r.kind = *kind;
      r.resolution = *resolution;
      // anchor the series at bucket index 0 from this row's date
      r.start_bucket = bucket_start_date(
          bucket_of(*date, *resolution) - static_cast<int>(*index), *resolution);
    }
    r.change_points.push_back(static_cast<int>(*index));
  }
  std::vector<CpdResult> out;
  for (auto& [key, result] : grouped) {
    std::sort(result.change_points.begin(), result.change_points.end());
    out.push_back(std::move(result));
  }
  return out;
}

struct EvaluateOutput {
  EvalReport report;
};

inline EvaluateOutput run_evaluate(const std::string& detections_path,
                                   const std::string& labels_path,
                                   const std::string& out_dir, int tolerance_buckets = 0) {
  const auto detections = load_detections_csv(detections_path);
  const auto labels = load_labels_csv(labels_path);
  EvaluateOutput out;
  out.report = build_report(detections, labels, tolerance_buckets);
  detail::write_text_file(
      (std::filesystem::path(out_dir) / "report.csv").string(), report_to_csv(out.report));
  detail::write_text_file(
      (std::filesystem::path(out_dir) / "report.txt").string(), report_to_table(out.report));
  return out;
}

// ---------------------------------------------------------------------------
// stats: records.jsonl -> per-country overview
// ---------------------------------------------------------------------------

inline std::vector<CorpusStats> run_stats(const std::string& out_dir) {
  const auto records =
      read_records_jsonl((std::filesystem::path(out_dir) / "records.jsonl").string());
  std::set<std::string> countries;
  for (const auto& r : records) countries.insert(r.country);
  std::vector<CorpusStats> out;
  for (const auto& country : countries) out.push_back(corpus_stats(records, country));

  std::string csv =
      "country,n_committees,n_protocols,period_start,period_end,mean_protocols_per_"
      "committee,median_protocols_per_committee\n";
  for (const auto& s : out)
    csv += csv_row({s.country, std::to_string(s.n_committees), std::to_string(s.n_protocols),
                    s.period_start.iso(), s.period_end.iso(),
                    format_double(s.mean_protocols_per_committee),
                    format_double(s.median_protocols_per_committee)});
  detail::write_text_file((std::filesystem::path(out_dir) / "stats.csv").string(), csv);
  return out;
}

}  // namespace parlscan
