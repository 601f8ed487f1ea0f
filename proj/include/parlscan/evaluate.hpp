#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "parlscan/changepoint.hpp"
#include "parlscan/csv.hpp"
#include "parlscan/model.hpp"

namespace parlscan {

// Expert verdict for one detected bucket: did something real happen
// there (recess, pandemic, dissolution, a charged debate) or not.
struct LabelEntry {
  std::string committee_id;
  FeatureKind kind = FeatureKind::MeetingsCount;
  Date bucket_start;
  enum class Verdict { TrueEvent, FalseEvent } verdict = Verdict::TrueEvent;
  std::string reason;
};

// Label file: CSV with header committee_id,feature,bucket_start,verdict,reason.
inline std::vector<LabelEntry> load_labels_csv(const std::string& path) {
  const auto rows = read_csv_file(path);
  const std::vector<std::string> expected = {"committee_id", "feature", "bucket_start",
                                             "verdict", "reason"};
  if (rows.empty() || rows.front() != expected)
    throw ConfigError("label file " + path +
                      ": header must be committee_id,feature,bucket_start,verdict,reason");
  std::vector<LabelEntry> out;
  std::set<std::string> seen;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5)
      throw DataError(path + ": row " + std::to_string(i + 1) + " malformed");
    LabelEntry e;
    e.committee_id = row[0];
    auto kind = feature_kind_from_id(row[1]);
    if (!kind) throw DataError(path + ": unknown feature " + row[1]);
    e.kind = *kind;
    auto date = parse_iso_date(row[2]);
    if (!date) throw DataError(path + ": bad bucket_start " + row[2]);
    e.bucket_start = *date;
    if (row[3] == "true_event")
      e.verdict = LabelEntry::Verdict::TrueEvent;
    else if (row[3] == "false_event")
      e.verdict = LabelEntry::Verdict::FalseEvent;
    else
      throw DataError(path + ": verdict must be true_event or false_event, got " + row[3]);
    e.reason = row[4];
    const std::string key = e.committee_id + "\x1f" + feature_kind_id(e.kind) + "\x1f" +
                            e.bucket_start.iso();
    if (!seen.insert(key).second)
      throw DataError(path + ": duplicate label for " + e.committee_id + "/" + row[1] +
                      "/" + row[2]);
    out.push_back(std::move(e));
  }
  return out;
}

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int unlabeled = 0;  // detections no expert classified; excluded from scores
};

// Matches detected change points against labels of the same committee and
// feature. Each detection takes the nearest unconsumed label within
// +-tolerance buckets (ties to the earlier label); each label is consumed
// at most once. tp + fp + unlabeled always equals the detection count.
inline MatchCounts match_detections(const CpdResult& result,
                                    const std::vector<LabelEntry>& labels,
                                    int tolerance_buckets = 0) {
  struct Candidate {
    int bucket;
    bool is_true;
    bool consumed = false;
  };
  std::vector<Candidate> pool;
  for (const auto& label : labels) {
    if (label.committee_id != result.committee_id || label.kind != result.kind) continue;
    pool.push_back({bucket_of(label.bucket_start, result.resolution),
                    label.verdict == LabelEntry::Verdict::TrueEvent});
  }
  std::sort(pool.begin(), pool.end(),
            [](const Candidate& a, const Candidate& b) { return a.bucket < b.bucket; });

  const int base = bucket_of(result.start_bucket, result.resolution);
  MatchCounts counts;
  for (int index : result.change_points) {
    const int detected = base + index;
    Candidate* nearest = nullptr;
    int nearest_dist = tolerance_buckets + 1;
    for (auto& c : pool) {
      if (c.consumed) continue;
      const int dist = std::abs(c.bucket - detected);
      if (dist < nearest_dist) {
        nearest_dist = dist;
        nearest = &c;
      }
    }
    if (!nearest) {
      ++counts.unlabeled;
      continue;
    }
    nearest->consumed = true;
    if (nearest->is_true)
      ++counts.tp;
    else
      ++counts.fp;
  }
  return counts;
}

// Precision and FPR exactly as reported: TP/(TP+FP) and FP/(TP+FP).
// This FPR is the complement of precision over labeled detections, not
// the confusion-matrix FP/(FP+TN); kept as defined, not corrected.
// Undefined (absent) when nothing was labeled.
inline std::optional<double> precision(int tp, int fp) {
  if (tp + fp <= 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

inline std::optional<double> fpr(int tp, int fp) {
  if (tp + fp <= 0) return std::nullopt;
  return static_cast<double>(fp) / static_cast<double>(tp + fp);
}

struct EvalRow {
  std::string committee_id;
  FeatureKind kind = FeatureKind::MeetingsCount;
  CpdAlgorithm algorithm = CpdAlgorithm::Pelt;
  int tp = 0;
  int fp = 0;
  int unlabeled = 0;
  std::optional<double> precision_score;
  std::optional<double> fpr_score;
};

struct AverageRow {
  FeatureKind kind = FeatureKind::MeetingsCount;
  CpdAlgorithm algorithm = CpdAlgorithm::Pelt;
  int n_defined = 0;  // committees with a defined precision
  std::optional<double> precision_score;
  std::optional<double> fpr_score;
};

struct OverallRow {
  CpdAlgorithm algorithm = CpdAlgorithm::Pelt;
  std::optional<double> precision_score;
  std::optional<double> fpr_score;
};

struct EvalReport {
  std::vector<EvalRow> rows;            // per (committee, feature, algorithm)
  std::vector<AverageRow> averages;     // per (feature, algorithm)
  std::vector<OverallRow> overall;      // per algorithm, mean of feature averages
};

// One row per (committee, feature, algorithm), plus unweighted averages
// over committees with defined precision. Average FPR is emitted as
// 1 - average precision, which equals the mean of the per-committee FPRs.
inline EvalReport build_report(const std::vector<CpdResult>& results,
                               const std::vector<LabelEntry>& labels,
                               int tolerance_buckets = 0) {
  EvalReport report;
  for (const auto& result : results) {
    const MatchCounts c = match_detections(result, labels, tolerance_buckets);
    EvalRow row;
    row.committee_id = result.committee_id;
    row.kind = result.kind;
    row.algorithm = result.algorithm;
    row.tp = c.tp;
    row.fp = c.fp;
    row.unlabeled = c.unlabeled;
    row.precision_score = precision(c.tp, c.fp);
    row.fpr_score = fpr(c.tp, c.fp);
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const EvalRow& a, const EvalRow& b) {
              if (a.committee_id != b.committee_id) return a.committee_id < b.committee_id;
              if (a.kind != b.kind) return a.kind < b.kind;
              return a.algorithm < b.algorithm;
            });

  std::map<std::pair<FeatureKind, CpdAlgorithm>, std::pair<double, int>> sums;
  for (const auto& row : report.rows) {
    if (!row.precision_score) continue;
    auto& [sum, count] = sums[{row.kind, row.algorithm}];
    sum += *row.precision_score;
    ++count;
  }
  std::map<CpdAlgorithm, std::pair<double, int>> overall_sums;
  for (const auto& [key, sum_count] : sums) {
    AverageRow avg;
    avg.kind = key.first;
    avg.algorithm = key.second;
    avg.n_defined = sum_count.second;
    if (sum_count.second > 0) {
      avg.precision_score = sum_count.first / sum_count.second;
      avg.fpr_score = 1.0 - *avg.precision_score;
      auto& [osum, ocount] = overall_sums[key.second];
      osum += *avg.precision_score;
      ++ocount;
    }
    report.averages.push_back(avg);
  }
  for (const auto& [algo, sum_count] : overall_sums) {
    OverallRow row;
    row.algorithm = algo;
    row.precision_score = sum_count.first / sum_count.second;
    row.fpr_score = 1.0 - *row.precision_score;
    report.overall.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

inline std::string report_to_csv(const EvalReport& report) {
  std::string out = "committee_id,feature,algorithm,tp,fp,unlabeled,precision,fpr\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& r : report.rows)
    out += csv_row({r.committee_id, feature_kind_id(r.kind), cpd_algorithm_id(r.algorithm),
                    std::to_string(r.tp), std::to_string(r.fp), std::to_string(r.unlabeled),
                    opt(r.precision_score), opt(r.fpr_score)});
  for (const auto& a : report.averages)
    out += csv_row({"average", feature_kind_id(a.kind), cpd_algorithm_id(a.algorithm), "",
                    "", "", opt(a.precision_score), opt(a.fpr_score)});
  for (const auto& o : report.overall)
    out += csv_row({"average", "overall", cpd_algorithm_id(o.algorithm), "", "", "",
                    opt(o.precision_score), opt(o.fpr_score)});
  return out;
}

// Aligned text table: committee, data type, then precision and FPR
// columns per algorithm.
inline std::string report_to_table(const EvalReport& report) {
  std::vector<CpdAlgorithm> algos;
  for (const auto& r : report.rows)
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
      algos.push_back(r.algorithm);
  std::sort(algos.begin(), algos.end());

  auto upper = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  std::vector<std::string> header = {"Committee", "Data Type"};
  for (auto a : algos) header.push_back("Precision " + upper(cpd_algorithm_id(a)));
  for (auto a : algos) header.push_back("FPR " + upper(cpd_algorithm_id(a)));

  auto opt = [](const std::optional<double>& v) {
    return v ? format_score(*v) : std::string("-");
  };

  std::vector<std::vector<std::string>> lines;
  auto emit_group = [&](const std::string& committee, FeatureKind kind,
                        auto&& find_scores) {
    std::vector<std::string> line = {committee, feature_kind_label(kind)};
    std::vector<std::string> precisions, fprs;
    for (auto a : algos) {
      auto [p, f] = find_scores(kind, a);
      precisions.push_back(opt(p));
      fprs.push_back(opt(f));
    }
    line.insert(line.end(), precisions.begin(), precisions.end());
    line.insert(line.end(), fprs.begin(), fprs.end());
    lines.push_back(std::move(line));
  };

  std::vector<std::string> committees;
  for (const auto& r : report.rows)
    if (std::find(committees.begin(), committees.end(), r.committee_id) == committees.end())
      committees.push_back(r.committee_id);

  for (const auto& committee : committees) {
    for (FeatureKind kind : kAllFeatureKinds) {
      bool any = false;
      for (const auto& r : report.rows)
        if (r.committee_id == committee && r.kind == kind) any = true;
      if (!any) continue;
      emit_group(committee, kind,
                 [&](FeatureKind k, CpdAlgorithm a)
                     -> std::pair<std::optional<double>, std::optional<double>> {
                   for (const auto& r : report.rows)
                     if (r.committee_id == committee && r.kind == k && r.algorithm == a)
                       return {r.precision_score, r.fpr_score};
                   return {std::nullopt, std::nullopt};
                 });
    }
  }
  for (FeatureKind kind : kAllFeatureKinds) {
    bool any = false;
    for (const auto& a : report.averages)
      if (a.kind == kind) any = true;
    if (!any) continue;
    emit_group("Average Score", kind,
               [&](FeatureKind k, CpdAlgorithm algo)
                   -> std::pair<std::optional<double>, std::optional<double>> {
                 for (const auto& a : report.averages)
                   if (a.kind == k && a.algorithm == algo)
                     return {a.precision_score, a.fpr_score};
                 return {std::nullopt, std::nullopt};
               });
  }
  if (!report.overall.empty()) {
    std::vector<std::string> line = {"Average Score", "Overall"};
    std::vector<std::string> precisions, fprs;
    for (auto algo : algos) {
      std::optional<double> p, f;
      for (const auto& o : report.overall)
        if (o.algorithm == algo) p = o.precision_score, f = o.fpr_score;
      precisions.push_back(opt(p));
      fprs.push_back(opt(f));
    }
    line.insert(line.end(), precisions.begin(), precisions.end());
    line.insert(line.end(), fprs.begin(), fprs.end());
    lines.push_back(std::move(line));
  }

  std::vector<size_t> widths(header.size(), 0);
  for (size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& line : lines)
    for (size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());

  std::string out;
  auto emit_line = [&](const std::vector<std::string>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) {
      out += cells[c];
      if (c + 1 < cells.size()) out.append(widths[c] - cells[c].size() + 2, ' ');
    }
    out += '\n';
  };
  emit_line(header);
  size_t total = 0;
  for (size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c + 1 < widths.size() ? 2 : 0);
  out.append(total, '-');
  out += '\n';
  for (const auto& line : lines) emit_line(line);
  return out;
}

}  // namespace parlscan
