#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parlscan/errors.hpp"
#include "parlscan/model.hpp"

namespace parlscan {

enum class InputKind { PlainTextDir, JsonRecords, CsvTable };

inline std::optional<InputKind> input_kind_from_id(std::string_view id) {
  if (id == "plain_text_dir") return InputKind::PlainTextDir;
  if (id == "json_records") return InputKind::JsonRecords;
  if (id == "csv_table") return InputKind::CsvTable;
  return std::nullopt;
}

enum class RuleStrategy { SidecarCopy, RegexCapture, Constant, LineRangeCount };
enum class RulePostprocess { None, Trim, SplitList, ParseDate, CharCount };

// One extraction step: how a schema field is obtained from a raw
// document. Strategies:
//   sidecar_copy     value of sidecar[source_key] (source_key defaults
//                    to the target field name)
//   regex_capture    first body match of `pattern`, capture group 1
//   constant         the literal in `value`
//   line_range_count number of non-empty lines inside the first body
//                    match of `pattern`, capture group 1
// Postprocess runs on the strategy result; split_list needs `delimiter`,
// char_count yields the code-point count of the whole body.
struct FieldRule {
  std::string target_field;
  RuleStrategy strategy = RuleStrategy::SidecarCopy;
  std::string pattern;
  RulePostprocess postprocess = RulePostprocess::None;
  std::string source_key;
  std::string value;
  std::string delimiter;
};

// Per-source collection settings: where the raw documents live, in what
// layout, and how schema fields are extracted from them.
struct SourceDescriptor {
  std::string source_id;
  std::string country;
  InputKind input_kind = InputKind::PlainTextDir;
  std::string root_path;
  std::string id_key;  // json/csv: sidecar key holding the native id
  std::vector<FieldRule> extraction_rules;
  std::map<std::string, std::string> defaults;
};

struct PipelineConfig {
  std::vector<SourceDescriptor> sources;
  std::optional<std::string> patches_path;
};

namespace detail {

inline RuleStrategy strategy_from_id(const std::string& id) {
  if (id == "sidecar_copy") return RuleStrategy::SidecarCopy;
  if (id == "regex_capture") return RuleStrategy::RegexCapture;
  if (id == "constant") return RuleStrategy::Constant;
  if (id == "line_range_count") return RuleStrategy::LineRangeCount;
  throw ConfigError("unknown rule strategy: " + id);
}

inline RulePostprocess postprocess_from_id(const std::string& id) {
  if (id == "none") return RulePostprocess::None;
  if (id == "trim") return RulePostprocess::Trim;
  if (id == "split_list") return RulePostprocess::SplitList;
  if (id == "parse_date") return RulePostprocess::ParseDate;
  if (id == "char_count") return RulePostprocess::CharCount;
  throw ConfigError("unknown rule postprocess: " + id);
}

inline void validate_rule(const FieldRule& rule, const std::string& where) {
  if (rule.target_field.empty())
    throw ConfigError(where + ": rule without target_field");
  if (rule.strategy == RuleStrategy::RegexCapture ||
      rule.strategy == RuleStrategy::LineRangeCount) {
    if (rule.pattern.empty())
      throw ConfigError(where + ": regex rule for " + rule.target_field +
                        " has no pattern");
    try {
      std::regex re(rule.pattern);
      if (re.mark_count() < 1)
        throw ConfigError(where + ": pattern for " + rule.target_field +
                          " needs one capture group");
    } catch (const std::regex_error& e) {
      throw ConfigError(where + ": bad pattern for " + rule.target_field + ": " +
                        e.what());
    }
  }
  if (rule.postprocess == RulePostprocess::SplitList && rule.delimiter.empty())
    throw ConfigError(where + ": split_list for " + rule.target_field +
                      " declares no delimiter");
}

}  // namespace detail

// Loads the pipeline configuration. Relative paths in the file resolve
// against the config file's directory, so runs do not depend on cwd.
inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);

  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  PipelineConfig cfg;
  if (!j.contains("sources") || !j["sources"].is_array())
    throw ConfigError("config needs a \"sources\" array");
  for (const auto& js : j["sources"]) {
    SourceDescriptor d;
    d.source_id = js.value("source_id", std::string());
    if (d.source_id.empty()) throw ConfigError("source without source_id");
    const std::string where = "source " + d.source_id;
    for (const auto& other : cfg.sources)
      if (other.source_id == d.source_id)
        throw ConfigError("duplicate source_id " + d.source_id);
    d.country = js.value("country", std::string());
    const std::string kind = js.value("input_kind", std::string());
    auto parsed_kind = input_kind_from_id(kind);
    if (!parsed_kind) throw ConfigError(where + ": unknown input_kind \"" + kind + "\"");
    d.input_kind = *parsed_kind;
    d.root_path = resolve(js.value("root_path", std::string()));
    if (!std::filesystem::exists(d.root_path))
      throw ConfigError(where + ": root_path does not exist: " + d.root_path);
    d.id_key = js.value("id_key", std::string());
    if (auto it = js.find("defaults"); it != js.end())
      for (const auto& [k, v] : it->items()) d.defaults[k] = v.get<std::string>();
    if (auto it = js.find("rules"); it != js.end()) {
      for (const auto& jr : *it) {
        FieldRule r;
        r.target_field = jr.value("target_field", std::string());
        r.strategy = detail::strategy_from_id(jr.value("strategy", std::string("sidecar_copy")));
        r.pattern = jr.value("pattern", std::string());
        r.postprocess = detail::postprocess_from_id(jr.value("postprocess", std::string("none")));
        r.source_key = jr.value("source_key", std::string());
        r.value = jr.value("value", std::string());
        r.delimiter = jr.value("delimiter", std::string());
        detail::validate_rule(r, where);
        d.extraction_rules.push_back(std::move(r));
      }
    }
    cfg.sources.push_back(std::move(d));
  }
  if (j.contains("patches")) cfg.patches_path = resolve(j["patches"].get<std::string>());
  return cfg;
}

}  // namespace parlscan
