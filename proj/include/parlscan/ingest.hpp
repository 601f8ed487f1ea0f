#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parlscan/config.hpp"
#include "parlscan/csv.hpp"
#include "parlscan/errors.hpp"
#include "parlscan/text.hpp"

namespace parlscan {

// Format-erased staging form of one collected document: the body text
// when the source has one, plus whatever structured fields came with it.
struct RawDocument {
  std::string source_id;
  std::string native_id;
  std::string body;
  std::map<std::string, std::string> sidecar;

  bool operator==(const RawDocument&) const = default;
};

// Manual repair of a collected document (e.g. a classified meeting whose
// file could not be downloaded): selected fields are written into the
// sidecar before parsing.
struct PatchEntry {
  std::string source_id;
  std::string native_id;
  std::map<std::string, std::string> set_fields;
  std::string reason;

  bool operator==(const PatchEntry&) const = default;
};

struct LoadResult {
  std::vector<RawDocument> documents;
  std::vector<std::string> warnings;  // one per skipped/malformed input
};

namespace detail {

inline std::string pick_native_id(const std::map<std::string, std::string>& sidecar,
                                  const std::string& id_key) {
  if (!id_key.empty()) {
    auto it = sidecar.find(id_key);
    return it == sidecar.end() ? std::string() : it->second;
  }
  for (const char* key : {"native_id", "id", "meeting_id"}) {
    auto it = sidecar.find(key);
    if (it != sidecar.end() && !it->second.empty()) return it->second;
  }
  return {};
}

inline std::string sidecar_value_from_json(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();  // numbers/bools/arrays keep their compact JSON form
}

}  // namespace detail

// Loads every document under a source. Output is ordered
// lexicographically by native_id regardless of on-disk layout, so a
// given tree always stages identically.
inline LoadResult load_source(const SourceDescriptor& d) {
  namespace fs = std::filesystem;
  LoadResult out;

  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  switch (d.input_kind) {
    case InputKind::PlainTextDir: {
      if (!fs::is_directory(d.root_path))
        throw IoError("source " + d.source_id + ": not a directory: " + d.root_path);
      for (const auto& entry : fs::directory_iterator(d.root_path)) {
        if (!entry.is_regular_file()) continue;
        RawDocument doc;
        doc.source_id = d.source_id;
        doc.native_id = entry.path().filename().string();
        doc.body = read_file(entry.path());
        out.documents.push_back(std::move(doc));
      }
      break;
    }
    case InputKind::JsonRecords: {
      const std::string text = read_file(d.root_path);
      std::vector<Json> objects;
      const std::string trimmed = trim(text);
      if (!trimmed.empty() && trimmed.front() == '[') {
        Json arr = Json::parse(trimmed, nullptr, false);
        if (arr.is_discarded() || !arr.is_array())
          throw DataError("source " + d.source_id + ": not a JSON array");
        for (auto& v : arr) objects.push_back(std::move(v));
      } else {
        std::istringstream lines(text);
        std::string line;
        size_t lineno = 0;
        while (std::getline(lines, line)) {
          ++lineno;
          if (trim(line).empty()) continue;
          Json obj = Json::parse(line, nullptr, false);
          if (obj.is_discarded() || !obj.is_object()) {
            out.warnings.push_back(d.source_id + ": malformed JSON at line " +
                                   std::to_string(lineno));
            continue;
          }
          objects.push_back(std::move(obj));
        }
      }
      for (const auto& obj : objects) {
        RawDocument doc;
        doc.source_id = d.source_id;
        for (const auto& [key, value] : obj.items()) {
          if (key == "body" && value.is_string())
            doc.body = value.get<std::string>();
          else
            doc.sidecar[key] = detail::sidecar_value_from_json(value);
        }
        doc.native_id = detail::pick_native_id(doc.sidecar, d.id_key);
        if (doc.native_id.empty()) {
          out.warnings.push_back(d.source_id + ": record without an id skipped");
          continue;
        }
        out.documents.push_back(std::move(doc));
      }
      break;
    }
    case InputKind::CsvTable: {
      const auto rows = read_csv_file(d.root_path);
      if (rows.empty()) break;
      const auto& header = rows.front();
      for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size()) {
          out.warnings.push_back(d.source_id + ": row " + std::to_string(i + 1) +
                                 " has " + std::to_string(row.size()) +
                                 " fields, expected " + std::to_string(header.size()));
          continue;
        }
        RawDocument doc;
        doc.source_id = d.source_id;
        for (size_t c = 0; c < header.size(); ++c) doc.sidecar[header[c]] = row[c];
        doc.native_id = detail::pick_native_id(doc.sidecar, d.id_key);
        if (doc.native_id.empty()) {
          out.warnings.push_back(d.source_id + ": row " + std::to_string(i + 1) +
                                 " has no id, skipped");
          continue;
        }
        out.documents.push_back(std::move(doc));
      }
      break;
    }
  }

  std::sort(out.documents.begin(), out.documents.end(),
            [](const RawDocument& a, const RawDocument& b) {
              return a.native_id < b.native_id;
            });
  return out;
}

struct PatchOutcome {
  std::vector<RawDocument> documents;
  size_t applied = 0;
  std::vector<PatchEntry> unapplied;
};

// Writes patch fields into matching documents' sidecars. Patches whose
// selector matches nothing are reported, not fatal. Document count and
// order never change.
inline PatchOutcome apply_patches(std::vector<RawDocument> docs,
                                  const std::vector<PatchEntry>& patches) {
  PatchOutcome out;
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (size_t i = 0; i < docs.size(); ++i)
    index[{docs[i].source_id, docs[i].native_id}] = i;
  for (const auto& patch : patches) {
    auto it = index.find({patch.source_id, patch.native_id});
    if (it == index.end()) {
      out.unapplied.push_back(patch);
      continue;
    }
    for (const auto& [field, value] : patch.set_fields)
      docs[it->second].sidecar[field] = value;
    ++out.applied;
  }
  out.documents = std::move(docs);
  return out;
}

// Patch file: CSV with header source_id,native_id,field,value,reason.
inline std::vector<PatchEntry> load_patches_csv(const std::string& path) {
  const auto rows = read_csv_file(path);
  if (rows.empty()) return {};
  const std::vector<std::string> expected = {"source_id", "native_id", "field",
                                             "value", "reason"};
  if (rows.front() != expected)
    throw ConfigError("patch file " + path +
                      ": header must be source_id,native_id,field,value,reason");
  std::vector<PatchEntry> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5)
      throw ConfigError("patch file " + path + ": row " + std::to_string(i + 1) +
                        " malformed");
    PatchEntry p;
    p.source_id = row[0];
    p.native_id = row[1];
    p.set_fields[row[2]] = row[3];
    p.reason = row[4];
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Staging store: one docs.jsonl per source under <dir>/<source_id>/.
// ---------------------------------------------------------------------------

inline Json raw_document_to_json(const RawDocument& doc) {
  Json j;
  j["source_id"] = doc.source_id;
  j["native_id"] = doc.native_id;
  j["body"] = doc.body;
  Json sidecar = Json::object();
  for (const auto& [k, v] : doc.sidecar) sidecar[k] = v;
  j["sidecar"] = sidecar;
  return j;
}

inline RawDocument raw_document_from_json(const Json& j) {
  RawDocument doc;
  doc.source_id = j.at("source_id").get<std::string>();
  doc.native_id = j.at("native_id").get<std::string>();
  doc.body = j.value("body", std::string());
  if (auto it = j.find("sidecar"); it != j.end())
    for (const auto& [k, v] : it->items()) doc.sidecar[k] = v.get<std::string>();
  return doc;
}

inline void write_staging(const std::vector<RawDocument>& docs, const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, std::vector<const RawDocument*>> by_source;
  for (const auto& d : docs) by_source[d.source_id].push_back(&d);
  for (const auto& [source_id, list] : by_source) {
    const fs::path source_dir = fs::path(dir) / source_id;
    fs::create_directories(source_dir);
    std::ofstream out(source_dir / "docs.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write staging for " + source_id);
    for (const RawDocument* d : list) out << raw_document_to_json(*d).dump() << '\n';
  }
}

inline std::vector<RawDocument> read_staging(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("staging directory missing: " + dir);
  std::vector<std::string> source_dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) source_dirs.push_back(entry.path().string());
  std::sort(source_dirs.begin(), source_dirs.end());

  std::vector<RawDocument> out;
  for (const auto& source_dir : source_dirs) {
    const auto file = fs::path(source_dir) / "docs.jsonl";
    if (!fs::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      Json j = Json::parse(line, nullptr, false);
      if (j.is_discarded()) throw DataError("corrupt staging line in " + file.string());
      out.push_back(raw_document_from_json(j));
    }
  }
  return out;
}

}  // namespace parlscan
