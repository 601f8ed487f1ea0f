#pragma once

#include <array>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "parlscan/config.hpp"
#include "parlscan/ingest.hpp"
#include "parlscan/model.hpp"
#include "parlscan/text.hpp"

namespace parlscan {

// A rule evaluates to text, a list, or a number; absence is a value,
// not an error (validation decides later whether the field was required).
using FieldValue = std::variant<std::string, std::vector<std::string>, std::int64_t>;

struct ParseFailure {
  std::string source_id;
  std::string native_id;
  std::vector<std::string> missing_fields;  // missing or invalid

  bool operator==(const ParseFailure&) const = default;
};

namespace detail {

inline std::vector<std::string> split_list_dedup(const std::string& raw,
                                                 const std::string& delimiter) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= raw.size()) {
    size_t pos = raw.find(delimiter, start);
    if (pos == std::string::npos) pos = raw.size();
    std::string item = trim(raw.substr(start, pos - start));
    if (!item.empty() &&
        std::find(out.begin(), out.end(), item) == out.end())
      out.push_back(std::move(item));
    if (pos == raw.size()) break;
    start = pos + delimiter.size();
  }
  return out;
}

inline std::int64_t count_nonempty_lines(const std::string& block) {
  std::int64_t n = 0;
  for (const auto& line : split(block, '\n'))
    if (!trim(line).empty()) ++n;
  return n;
}

}  // namespace detail

// Runs one extraction rule against one document.
inline std::optional<FieldValue> extract_field(const FieldRule& rule,
                                               const RawDocument& doc) {
  // char_count is defined as the code-point count of the whole body,
  // whatever the strategy says.
  if (rule.postprocess == RulePostprocess::CharCount)
    return FieldValue{utf8_length(doc.body)};

  std::optional<std::string> raw;
  switch (rule.strategy) {
    case RuleStrategy::SidecarCopy: {
      const std::string& key =
          rule.source_key.empty() ? rule.target_field : rule.source_key;
      auto it = doc.sidecar.find(key);
      if (it != doc.sidecar.end() && !it->second.empty()) raw = it->second;
      break;
    }
    case RuleStrategy::RegexCapture:
    case RuleStrategy::LineRangeCount: {
      std::regex re(rule.pattern);
      std::smatch m;
      if (std::regex_search(doc.body, m, re) && m.size() > 1) {
        if (rule.strategy == RuleStrategy::LineRangeCount)
          return FieldValue{detail::count_nonempty_lines(m[1].str())};
        raw = m[1].str();
      }
      break;
    }
    case RuleStrategy::Constant:
      if (!rule.value.empty()) raw = rule.value;
      break;
  }
  if (!raw) return std::nullopt;

  switch (rule.postprocess) {
    case RulePostprocess::None:
      return FieldValue{*raw};
    case RulePostprocess::Trim:
      return FieldValue{trim(*raw)};
    case RulePostprocess::SplitList: {
      // Items are trimmed and deduplicated, first occurrence kept.
      auto items = detail::split_list_dedup(*raw, rule.delimiter);
      if (items.empty()) return std::nullopt;
      return FieldValue{std::move(items)};
    }
    case RulePostprocess::ParseDate: {
      auto date = parse_flexible_date(*raw);
      if (!date) return std::nullopt;
      return FieldValue{date->iso()};
    }
    case RulePostprocess::CharCount:
      break;  // handled above
  }
  return std::nullopt;
}

namespace detail {

inline const std::set<std::string>& schema_fields() {
  static const std::set<std::string> fields = {
      "country",          "parliament_name",  "parliament_id",
      "parliament_type",  "committee_id",     "committee_name",
      "meeting_id",       "title",            "date",
      "committee_members", "parliament_members", "document_length"};
  return fields;
}

inline std::string value_as_text(const FieldValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  if (std::holds_alternative<std::int64_t>(v))
    return std::to_string(std::get<std::int64_t>(v));
  return join(std::get<std::vector<std::string>>(v), "; ");
}

inline std::vector<std::string> value_as_list(const FieldValue& v) {
  if (std::holds_alternative<std::vector<std::string>>(v))
    return std::get<std::vector<std::string>>(v);
  const std::string text = value_as_text(v);
  if (trim(text).empty()) return {};
  return {trim(text)};
}

}  // namespace detail

// Turns one raw document into a ProtocolRecord. Field precedence:
// sidecar-backed rules beat body-derived ones (the sidecar holds
// patched, human-verified values), then remaining rules in config
// order, then the source's constant defaults. Rule targets outside the
// general schema land in the extensions map.
inline std::variant<ProtocolRecord, ParseFailure> parse_document(
    const RawDocument& doc, const SourceDescriptor& descriptor) {
  std::map<std::string, FieldValue> values;

  auto consider = [&](const std::string& target, std::optional<FieldValue> v) {
    if (!v) return;
    if (values.find(target) == values.end()) values.emplace(target, std::move(*v));
  };

  for (const auto& rule : descriptor.extraction_rules)
    if (rule.strategy == RuleStrategy::SidecarCopy)
      consider(rule.target_field, extract_field(rule, doc));
  for (const auto& rule : descriptor.extraction_rules)
    if (rule.strategy != RuleStrategy::SidecarCopy)
      consider(rule.target_field, extract_field(rule, doc));
  for (const auto& [field, constant] : descriptor.defaults)
    if (!constant.empty()) consider(field, FieldValue{constant});

  auto text_of = [&](const std::string& field) -> std::string {
    auto it = values.find(field);
    return it == values.end() ? std::string() : detail::value_as_text(it->second);
  };
  auto list_of = [&](const std::string& field) -> std::vector<std::string> {
    auto it = values.find(field);
    return it == values.end() ? std::vector<std::string>()
                              : detail::value_as_list(it->second);
  };

  ProtocolRecord r;
  r.country = text_of("country");
  if (r.country.empty()) r.country = descriptor.country;
  r.parliament_name = text_of("parliament_name");
  r.parliament_id = text_of("parliament_id");
  r.parliament_type = text_of("parliament_type");
  r.committee_id = text_of("committee_id");
  r.committee_name = text_of("committee_name");
  r.meeting_id = text_of("meeting_id");
  r.title = text_of("title");

  std::vector<std::string> missing;
  if (r.country.empty()) missing.push_back("country");
  if (r.committee_id.empty()) missing.push_back("committee_id");
  if (r.meeting_id.empty()) missing.push_back("meeting_id");

  const std::string date_text = text_of("date");
  if (date_text.empty()) {
    missing.push_back("date");
  } else if (auto date = parse_flexible_date(date_text)) {
    r.date = *date;
  } else {
    missing.push_back("date");
  }

  if (!missing.empty())
    return ParseFailure{doc.source_id, doc.native_id, std::move(missing)};

  auto dedup_keep_order = [](std::vector<std::string> names) {
    std::vector<std::string> out;
    for (auto& n : names)
      if (std::find(out.begin(), out.end(), n) == out.end())
        out.push_back(std::move(n));
    return out;
  };
  r.committee_members = dedup_keep_order(list_of("committee_members"));
  r.parliament_members = dedup_keep_order(list_of("parliament_members"));

  // Document length is the body's character count whenever a body is
  // present; only body-less (patched/classified) records take it from a
  // rule, and records with neither stay at 0.
  if (!doc.body.empty()) {
    r.document_length = utf8_length(doc.body);
  } else if (auto it = values.find("document_length"); it != values.end()) {
    if (std::holds_alternative<std::int64_t>(it->second)) {
      r.document_length = std::get<std::int64_t>(it->second);
    } else if (auto n = parse_int(detail::value_as_text(it->second))) {
      r.document_length = *n;
    }
    if (r.document_length < 0) r.document_length = 0;
  }

  for (const auto& [field, value] : values) {
    if (detail::schema_fields().count(field)) continue;
    if (std::holds_alternative<std::vector<std::string>>(value))
      r.extensions[field] = std::get<std::vector<std::string>>(value);
    else
      r.extensions[field] = detail::value_as_text(value);
  }
  return r;
}

struct ParsedCorpus {
  std::vector<ProtocolRecord> records;
  std::vector<ParseFailure> failures;
};

// Partitions a document set: every input lands in exactly one bucket.
inline ParsedCorpus parse_corpus(const std::vector<RawDocument>& docs,
                                 const SourceDescriptor& descriptor) {
  ParsedCorpus out;
  for (const auto& doc : docs) {
    auto result = parse_document(doc, descriptor);
    if (std::holds_alternative<ProtocolRecord>(result))
      out.records.push_back(std::get<ProtocolRecord>(std::move(result)));
    else
      out.failures.push_back(std::get<ParseFailure>(std::move(result)));
  }
  return out;
}

}  // namespace parlscan
