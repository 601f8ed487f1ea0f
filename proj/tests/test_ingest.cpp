#include <catch2/catch_amalgamated.hpp>

#include "parlscan/ingest.hpp"
#include "test_support.hpp"

using namespace parlscan;
using test_support::TempDir;
using test_support::write_file;

namespace {

SourceDescriptor text_dir_source(const std::string& root) {
  SourceDescriptor d;
  d.source_id = "txt";
  d.country = "US";
  d.input_kind = InputKind::PlainTextDir;
  d.root_path = root;
  return d;
}

}  // namespace

TEST_CASE("load_source: plain text directory, one document per file") {
  TempDir dir;
  write_file(dir.file("b.txt"), "second body");
  write_file(dir.file("a.txt"), "first body");
  write_file(dir.file("c.txt"), "third body");

  auto result = load_source(text_dir_source(dir.str()));
  REQUIRE(result.documents.size() == 3);
  CHECK(result.warnings.empty());
  CHECK(result.documents[0].native_id == "a.txt");  // lexicographic order
  CHECK(result.documents[0].body == "first body");
  CHECK(result.documents[0].sidecar.empty());
  CHECK(result.documents[2].native_id == "c.txt");
}

TEST_CASE("load_source is deterministic") {
  TempDir dir;
  write_file(dir.file("z.txt"), "z");
  write_file(dir.file("m.txt"), "m");
  auto first = load_source(text_dir_source(dir.str()));
  auto second = load_source(text_dir_source(dir.str()));
  CHECK(first.documents == second.documents);
}

TEST_CASE("load_source: json records, one document per object") {
  TempDir dir;
  write_file(dir.file("meetings.jsonl"),
             "{\"id\":\"m2\",\"date\":\"2020-01-05\",\"body\":\"text two\"}\n"
             "{\"id\":\"m1\",\"date\":\"2020-01-04\",\"n\":7}\n"
             "not json at all\n");
  SourceDescriptor d;
  d.source_id = "js";
  d.input_kind = InputKind::JsonRecords;
  d.root_path = dir.file("meetings.jsonl");

  auto result = load_source(d);
  REQUIRE(result.documents.size() == 2);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.documents[0].native_id == "m1");
  CHECK(result.documents[0].sidecar.at("n") == "7");  // non-strings keep JSON form
  CHECK(result.documents[0].body.empty());
  CHECK(result.documents[1].body == "text two");
  CHECK(result.documents[1].sidecar.count("body") == 0);
}

TEST_CASE("load_source: json records scales to a full scrape") {
  TempDir dir;
  std::string lines;
  for (int i = 0; i < 12124; ++i)
    lines += "{\"id\":\"ca-" + std::to_string(100000 + i) + "\",\"committee\":\"fina\"}\n";
  write_file(dir.file("ca.jsonl"), lines);
  SourceDescriptor d;
  d.source_id = "ca";
  d.input_kind = InputKind::JsonRecords;
  d.root_path = dir.file("ca.jsonl");
  auto result = load_source(d);
  CHECK(result.documents.size() == 12124);
  CHECK(result.warnings.empty());
}

TEST_CASE("load_source: csv table rows become sidecars") {
  TempDir dir;
  write_file(dir.file("t.csv"),
             "meeting_no,committee,when\n"
             "200,fina,2019-02-01\n"
             ",fina,2019-02-02\n"      // no id -> skipped
             "201,health\n"            // wrong arity -> skipped
             "199,\"health\",2019-01-07\n");
  SourceDescriptor d;
  d.source_id = "csv";
  d.input_kind = InputKind::CsvTable;
  d.root_path = dir.file("t.csv");
  d.id_key = "meeting_no";

  auto result = load_source(d);
  REQUIRE(result.documents.size() == 2);
  CHECK(result.warnings.size() == 2);
  CHECK(result.documents[0].native_id == "199");
  CHECK(result.documents[1].sidecar.at("when") == "2019-02-01");
}

TEST_CASE("apply_patches: matching selector updates the sidecar") {
  std::vector<RawDocument> docs = {
      {"il", "m1", "", {{"committee_id", "fin"}}},
      {"il", "m2", "", {}},
  };
  PatchEntry p{"il", "m2", {{"date", "2014-06-10"}}, "classified meeting"};
  auto out = apply_patches(docs, {p});
  CHECK(out.applied == 1);
  CHECK(out.unapplied.empty());
  CHECK(out.documents.size() == 2);
  CHECK(out.documents[1].sidecar.at("date") == "2014-06-10");
}

TEST_CASE("apply_patches: empty patch list is the identity") {
  std::vector<RawDocument> docs = {{"il", "m1", "body", {{"k", "v"}}}};
  auto out = apply_patches(docs, {});
  CHECK(out.documents == docs);
  CHECK(out.applied == 0);
}

TEST_CASE("apply_patches: disjoint patches on one document both apply") {
  std::vector<RawDocument> docs = {{"il", "m1", "", {}}};
  PatchEntry a{"il", "m1", {{"date", "2020-01-01"}}, ""};
  PatchEntry b{"il", "m1", {{"committee_id", "fin"}}, ""};
  auto out = apply_patches(docs, {a, b});
  CHECK(out.applied == 2);
  CHECK(out.documents[0].sidecar.at("date") == "2020-01-01");
  CHECK(out.documents[0].sidecar.at("committee_id") == "fin");
}

TEST_CASE("apply_patches: unmatched selector is reported, not fatal") {
  std::vector<RawDocument> docs = {{"il", "m1", "", {}}};
  PatchEntry ghost{"il", "nope", {{"date", "2020-01-01"}}, "typo"};
  auto out = apply_patches(docs, {ghost});
  CHECK(out.applied == 0);
  REQUIRE(out.unapplied.size() == 1);
  CHECK(out.unapplied[0].native_id == "nope");
  CHECK(out.documents == docs);
}

TEST_CASE("apply_patches is idempotent") {
  std::vector<RawDocument> docs = {{"il", "m1", "", {}}, {"il", "m2", "", {}}};
  std::vector<PatchEntry> patches = {
      {"il", "m1", {{"date", "2020-01-01"}, {"committee_id", "fin"}}, ""}};
  auto once = apply_patches(docs, patches);
  auto twice = apply_patches(once.documents, patches);
  CHECK(once.documents == twice.documents);
}

TEST_CASE("patch csv loader") {
  TempDir dir;
  write_file(dir.file("patches.csv"),
             "source_id,native_id,field,value,reason\n"
             "il,m9,date,2014-06-10,\"classified, restored by hand\"\n");
  auto patches = load_patches_csv(dir.file("patches.csv"));
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].set_fields.at("date") == "2014-06-10");
  CHECK(patches[0].reason == "classified, restored by hand");

  write_file(dir.file("bad.csv"), "a,b\n1,2\n");
  CHECK_THROWS_AS(load_patches_csv(dir.file("bad.csv")), ConfigError);
}

TEST_CASE("staging store round-trips documents") {
  TempDir dir;
  std::vector<RawDocument> docs = {
      {"a_src", "1", "text", {{"k", "v"}}},
      {"b_src", "2", "", {{"date", "2020-01-01"}}},
  };
  write_staging(docs, dir.str());
  CHECK(std::filesystem::exists(dir.path / "a_src" / "docs.jsonl"));
  CHECK(std::filesystem::exists(dir.path / "b_src" / "docs.jsonl"));
  CHECK(read_staging(dir.str()) == docs);
}
