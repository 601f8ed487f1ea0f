#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parlscan/date.hpp"
#include "parlscan/errors.hpp"
#include "parlscan/text.hpp"

namespace parlscan {

using Json = nlohmann::ordered_json;

// Extension fields are either a single value or a list (e.g. the US
// witness list). Keys are source-defined; the US schema uses
// "serial_numbers", "witnesses" and "location_id".
using ExtensionValue = std::variant<std::string, std::vector<std::string>>;
using ExtensionMap = std::map<std::string, ExtensionValue>;

namespace us_ext {
inline constexpr const char* kSerialNumbers = "serial_numbers";
inline constexpr const char* kWitnesses = "witnesses";
inline constexpr const char* kLocationId = "location_id";
}  // namespace us_ext

// One normalized committee meeting. Shared schema for every source;
// per-parliament fields go into `extensions`.
//
// `document_length` counts Unicode code points of the source body,
// whitespace included; it is 0 only for records whose body was missing
// at collection time (classified/patched meetings).
struct ProtocolRecord {
  std::string country;  // ISO-3166 alpha-2
  std::string parliament_name;
  std::string parliament_id;
  std::string parliament_type;
  std::string committee_id;
  std::string committee_name;
  std::string meeting_id;
  std::string title;
  Date date;
  std::vector<std::string> committee_members;
  std::vector<std::string> parliament_members;
  std::int64_t document_length = 0;
  ExtensionMap extensions;

  bool operator==(const ProtocolRecord&) const = default;
};

// Per-meeting features feeding all analytics.
struct FeatureVector {
  std::string committee_id;
  std::string meeting_id;
  std::int64_t text_length = 0;
  std::optional<double> duration_minutes;
  int year = 0;
  int month = 0;
  std::int64_t n_committee_members = 0;
  std::int64_t n_parliament_members = 0;

  bool operator==(const FeatureVector&) const = default;
};

// The three analyzed features. Meeting duration is carried on
// FeatureVector but is not analyzed (no source defines it reliably).
enum class FeatureKind { MeetingsCount, AvgCommitteeMembers, AvgTextLength };

inline constexpr std::array<FeatureKind, 3> kAllFeatureKinds = {
    FeatureKind::MeetingsCount, FeatureKind::AvgCommitteeMembers,
    FeatureKind::AvgTextLength};

inline std::string feature_kind_id(FeatureKind k) {
  switch (k) {
    case FeatureKind::MeetingsCount: return "meetings_count";
    case FeatureKind::AvgCommitteeMembers: return "avg_committee_members";
    case FeatureKind::AvgTextLength: return "avg_text_length";
  }
  return "?";
}

inline std::string feature_kind_label(FeatureKind k) {
  switch (k) {
    case FeatureKind::MeetingsCount: return "Number of meetings";
    case FeatureKind::AvgCommitteeMembers: return "Number of members";
    case FeatureKind::AvgTextLength: return "Text Length";
  }
  return "?";
}

inline std::optional<FeatureKind> feature_kind_from_id(std::string_view id) {
  for (FeatureKind k : kAllFeatureKinds)
    if (feature_kind_id(k) == id) return k;
  return std::nullopt;
}

// Per-country corpus overview: n protocols over k committees across a
// period of t years.
struct CorpusStats {
  std::string country;
  std::int64_t n_committees = 0;
  std::int64_t n_protocols = 0;
  Date period_start;
  Date period_end;
  double mean_protocols_per_committee = 0.0;
  double median_protocols_per_committee = 0.0;
};

struct Violation {
  std::string field;
  std::string rule;
};

// Per-record invariant check. Never throws; an empty result means the
// record is well formed.
inline std::vector<Violation> validate_record(const ProtocolRecord& r) {
  std::vector<Violation> out;
  if (r.country.empty()) out.push_back({"country", "must be non-empty"});
  if (r.committee_id.empty()) out.push_back({"committee_id", "must be non-empty"});
  if (r.meeting_id.empty()) out.push_back({"meeting_id", "must be non-empty"});
  if (!r.date.valid()) out.push_back({"date", "not a valid calendar date"});
  if (r.document_length < 0) out.push_back({"document_length", "must be non-negative"});

  auto check_dups = [&out](const std::vector<std::string>& names, const char* field) {
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      out.push_back({field, "duplicate member"});
  };
  check_dups(r.committee_members, "committee_members");
  check_dups(r.parliament_members, "parliament_members");
  return out;
}

// Corpus-level invariant: meeting_id unique within (country, committee_id).
inline std::vector<Violation> validate_corpus(const std::vector<ProtocolRecord>& records) {
  std::vector<Violation> out;
  std::vector<std::string> keys;
  keys.reserve(records.size());
  for (const auto& r : records)
    keys.push_back(r.country + "\x1f" + r.committee_id + "\x1f" + r.meeting_id);
  std::sort(keys.begin(), keys.end());
  for (size_t i = 1; i < keys.size(); ++i)
    if (keys[i] == keys[i - 1] && (i == 1 || keys[i] != keys[i - 2]))
      out.push_back({"meeting_id", "duplicate within committee: " + keys[i]});
  return out;
}

// ---------------------------------------------------------------------------
// Serialization. One JSON object per line ("records.jsonl"), field names
// the snake_case of the general schema, dates ISO-8601, extensions a
// nested object. insertion-ordered JSON keeps output byte-stable.
// ---------------------------------------------------------------------------

inline Json record_to_json(const ProtocolRecord& r) {
  Json ext = Json::object();
  for (const auto& [key, value] : r.extensions) {
    if (std::holds_alternative<std::string>(value))
      ext[key] = std::get<std::string>(value);
    else
      ext[key] = std::get<std::vector<std::string>>(value);
  }
  Json j;
  j["country"] = r.country;
  j["parliament_name"] = r.parliament_name;
  j["parliament_id"] = r.parliament_id;
  j["parliament_type"] = r.parliament_type;
  j["committee_id"] = r.committee_id;
  j["committee_name"] = r.committee_name;
  j["meeting_id"] = r.meeting_id;
  j["title"] = r.title;
  j["date"] = r.date.iso();
  j["committee_members"] = r.committee_members;
  j["parliament_members"] = r.parliament_members;
  j["document_length"] = r.document_length;
  j["extensions"] = ext;
  return j;
}

inline ProtocolRecord record_from_json(const Json& j) {
  ProtocolRecord r;
  r.country = j.at("country").get<std::string>();
  r.parliament_name = j.value("parliament_name", std::string());
  r.parliament_id = j.value("parliament_id", std::string());
  r.parliament_type = j.value("parliament_type", std::string());
  r.committee_id = j.at("committee_id").get<std::string>();
  r.committee_name = j.value("committee_name", std::string());
  r.meeting_id = j.at("meeting_id").get<std::string>();
  r.title = j.value("title", std::string());
  const std::string date = j.at("date").get<std::string>();
  auto parsed = parse_iso_date(date);
  if (!parsed) throw DataError("record has invalid date: " + date);
  r.date = *parsed;
  r.committee_members = j.value("committee_members", std::vector<std::string>());
  r.parliament_members = j.value("parliament_members", std::vector<std::string>());
  r.document_length = j.value("document_length", std::int64_t{0});
  if (auto it = j.find("extensions"); it != j.end()) {
    for (const auto& [key, value] : it->items()) {
      if (value.is_array())
        r.extensions[key] = value.get<std::vector<std::string>>();
      else
        r.extensions[key] = value.get<std::string>();
    }
  }
  return r;
}

inline void write_records_jsonl(const std::vector<ProtocolRecord>& records,
                                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

inline std::vector<ProtocolRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::vector<ProtocolRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON");
    out.push_back(record_from_json(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

// Median with the even-length convention: mean of the two middle values.
inline double median_of(std::vector<double> values) {
  if (values.empty()) throw DataError("median of empty list");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

inline CorpusStats corpus_stats(const std::vector<ProtocolRecord>& records,
                                const std::string& country) {
  std::map<std::string, std::int64_t> per_committee;
  CorpusStats s;
  s.country = country;
  bool first = true;
  for (const auto& r : records) {
    if (r.country != country) continue;
    ++per_committee[r.committee_id];
    ++s.n_protocols;
    if (first || r.date < s.period_start) s.period_start = r.date;
    if (first || s.period_end < r.date) s.period_end = r.date;
    first = false;
  }
  if (s.n_protocols == 0) throw DataError("no records for country " + country);
  s.n_committees = static_cast<std::int64_t>(per_committee.size());
  s.mean_protocols_per_committee =
      static_cast<double>(s.n_protocols) / static_cast<double>(s.n_committees);
  std::vector<double> counts;
  counts.reserve(per_committee.size());
  for (const auto& [id, n] : per_committee) counts.push_back(static_cast<double>(n));
  s.median_protocols_per_committee = median_of(std::move(counts));
  return s;
}

}  // namespace parlscan
