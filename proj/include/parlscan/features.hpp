#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parlscan/errors.hpp"
#include "parlscan/model.hpp"
#include "parlscan/text.hpp"

namespace parlscan {

namespace detail {

// "HH:MM", 24h clock.
inline std::optional<int> parse_clock_minutes(const std::string& s) {
  const std::string t = trim(s);
  if (t.size() != 5 || t[2] != ':') return std::nullopt;
  auto h = parse_int(t.substr(0, 2));
  auto m = parse_int(t.substr(3, 2));
  if (!h || !m || *h < 0 || *h > 23 || *m < 0 || *m > 59) return std::nullopt;
  return static_cast<int>(*h * 60 + *m);
}

inline std::optional<std::string> extension_text(const ProtocolRecord& r,
                                                 const std::string& key) {
  auto it = r.extensions.find(key);
  if (it == r.extensions.end()) return std::nullopt;
  if (!std::holds_alternative<std::string>(it->second)) return std::nullopt;
  return std::get<std::string>(it->second);
}

}  // namespace detail

// Pure per-record feature derivation. Duration is present only when the
// record carries "start_time"/"end_time" extensions (HH:MM) with
// end >= start; no source schema defines duration directly.
inline FeatureVector extract_features(const ProtocolRecord& r) {
  FeatureVector f;
  f.committee_id = r.committee_id;
  f.meeting_id = r.meeting_id;
  f.text_length = r.document_length;
  f.year = r.date.year;
  f.month = r.date.month;
  f.n_committee_members = static_cast<std::int64_t>(r.committee_members.size());
  f.n_parliament_members = static_cast<std::int64_t>(r.parliament_members.size());

  auto start = detail::extension_text(r, "start_time");
  auto end = detail::extension_text(r, "end_time");
  if (start && end) {
    auto s = detail::parse_clock_minutes(*start);
    auto e = detail::parse_clock_minutes(*end);
    if (s && e && *e >= *s) f.duration_minutes = static_cast<double>(*e - *s);
  }
  return f;
}

// Records of one committee in chronological order (ties by meeting_id).
inline std::vector<const ProtocolRecord*> committee_records(
    const std::vector<ProtocolRecord>& corpus, const std::string& committee_id) {
  std::vector<const ProtocolRecord*> out;
  for (const auto& r : corpus)
    if (r.committee_id == committee_id) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const ProtocolRecord* a, const ProtocolRecord* b) {
    if (a->date != b->date) return a->date < b->date;
    return a->meeting_id < b->meeting_id;
  });
  return out;
}

// The distribution a feature is analyzed over, in chronological order:
//   MeetingsCount       one count per calendar month of the committee's
//                       active span (months without meetings count 0)
//   AvgCommitteeMembers one value per meeting
//   AvgTextLength       one value per meeting
inline std::vector<double> feature_values(const std::vector<ProtocolRecord>& corpus,
                                          const std::string& committee_id,
                                          FeatureKind kind) {
  const auto records = committee_records(corpus, committee_id);
  if (records.empty()) throw DataError("unknown committee: " + committee_id);

  std::vector<double> out;
  if (kind == FeatureKind::MeetingsCount) {
    const int first = records.front()->date.month_index();
    const int last = records.back()->date.month_index();
    out.assign(static_cast<size_t>(last - first + 1), 0.0);
    for (const ProtocolRecord* r : records)
      out[static_cast<size_t>(r->date.month_index() - first)] += 1.0;
    return out;
  }
  out.reserve(records.size());
  for (const ProtocolRecord* r : records) {
    if (kind == FeatureKind::AvgCommitteeMembers)
      out.push_back(static_cast<double>(r->committee_members.size()));
    else
      out.push_back(static_cast<double>(r->document_length));
  }
  return out;
}

// Most active committees of a country: meeting count descending, ties by
// committee_id ascending, truncated to k (fewer if fewer exist).
inline std::vector<std::pair<std::string, std::int64_t>> top_k_committees(
    const std::vector<ProtocolRecord>& corpus, const std::string& country, int k) {
  if (k < 1) throw std::invalid_argument("top_k_committees: k must be >= 1");
  std::map<std::string, std::int64_t> counts;
  for (const auto& r : corpus)
    if (r.country == country) ++counts[r.committee_id];
  std::vector<std::pair<std::string, std::int64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > static_cast<size_t>(k)) out.resize(static_cast<size_t>(k));
  return out;
}

}  // namespace parlscan
