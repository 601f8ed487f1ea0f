#include <catch2/catch_amalgamated.hpp>

#include "parlscan/parse.hpp"

using namespace parlscan;

namespace {

FieldRule regex_rule(const std::string& target, const std::string& pattern,
                     RulePostprocess post = RulePostprocess::None) {
  FieldRule r;
  r.target_field = target;
  r.strategy = RuleStrategy::RegexCapture;
  r.pattern = pattern;
  r.postprocess = post;
  return r;
}

FieldRule sidecar_rule(const std::string& target, const std::string& key = "",
                       RulePostprocess post = RulePostprocess::None,
                       const std::string& delim = "") {
  FieldRule r;
  r.target_field = target;
  r.strategy = RuleStrategy::SidecarCopy;
  r.source_key = key;
  r.postprocess = post;
  r.delimiter = delim;
  return r;
}

// A descriptor in the shape of the bundled IL source: structured
// records with sidecar fields and an optional body.
SourceDescriptor il_like_descriptor() {
  SourceDescriptor d;
  d.source_id = "il";
  d.country = "IL";
  d.defaults = {{"parliament_name", "Knesset"}, {"parliament_type", "unicameral"}};
  d.extraction_rules = {
      sidecar_rule("meeting_id", "id"),
      sidecar_rule("committee_id"),
      sidecar_rule("committee_name"),
      sidecar_rule("title"),
      sidecar_rule("date", "", RulePostprocess::ParseDate),
      sidecar_rule("committee_members", "members", RulePostprocess::SplitList, ";"),
      sidecar_rule("parliament_members", "mks", RulePostprocess::SplitList, ";"),
      sidecar_rule("start_time"),
      sidecar_rule("end_time"),
  };
  return d;
}

RawDocument il_doc(const std::string& id, const std::string& date,
                   const std::string& body = "some protocol text") {
  RawDocument doc;
  doc.source_id = "il";
  doc.native_id = id;
  doc.body = body;
  doc.sidecar = {{"id", id},
                 {"committee_id", "fin"},
                 {"committee_name", "Finance"},
                 {"title", "Budget session"},
                 {"date", date},
                 {"members", "A. Cohen; D. Levi"},
                 {"mks", "MK One; MK Two; MK One"}};
  return doc;
}

}  // namespace

TEST_CASE("extract_field: direct regex capture") {
  RawDocument doc;
  doc.body = "Committee on Finance convened at noon.";
  auto v = extract_field(regex_rule("committee_name", "Committee on (\\w+)"), doc);
  REQUIRE(v.has_value());
  CHECK(std::get<std::string>(*v) == "Finance");
}

TEST_CASE("extract_field: absence is a value, not an error") {
  RawDocument doc;
  doc.body = "nothing of interest";
  CHECK_FALSE(extract_field(regex_rule("committee_name", "Committee on (\\w+)"), doc)
                  .has_value());
  CHECK_FALSE(extract_field(sidecar_rule("date"), doc).has_value());
}

TEST_CASE("extract_field: char_count returns the body length") {
  RawDocument doc;
  doc.body = std::string(1000, 'x');
  FieldRule r;
  r.target_field = "document_length";
  r.strategy = RuleStrategy::Constant;
  r.postprocess = RulePostprocess::CharCount;
  auto v = extract_field(r, doc);
  REQUIRE(v.has_value());
  CHECK(std::get<std::int64_t>(*v) == 1000);
}

TEST_CASE("extract_field: split_list trims and collapses duplicates") {
  RawDocument doc;
  doc.sidecar = {{"members", "A; B ;B"}};
  auto v = extract_field(
      sidecar_rule("committee_members", "members", RulePostprocess::SplitList, ";"), doc);
  REQUIRE(v.has_value());
  CHECK(std::get<std::vector<std::string>>(*v) == std::vector<std::string>{"A", "B"});
}

TEST_CASE("extract_field: constant and trim") {
  RawDocument doc;
  FieldRule c;
  c.target_field = "parliament_id";
  c.strategy = RuleStrategy::Constant;
  c.value = "knesset";
  CHECK(std::get<std::string>(*extract_field(c, doc)) == "knesset");

  doc.body = "Title:   Budget  \nrest";
  auto v = extract_field(regex_rule("title", "Title:(.*)", RulePostprocess::Trim), doc);
  CHECK(std::get<std::string>(*v) == "Budget");
}

TEST_CASE("extract_field: line_range_count counts non-empty captured lines") {
  RawDocument doc;
  doc.body = "Attendees:\nAlice\nBob\n\nCarol\nEND\n";
  FieldRule r;
  r.target_field = "n_attendees";
  r.strategy = RuleStrategy::LineRangeCount;
  r.pattern = "Attendees:\\n([\\s\\S]*)END";
  auto v = extract_field(r, doc);
  REQUIRE(v.has_value());
  CHECK(std::get<std::int64_t>(*v) == 3);
}

TEST_CASE("parse_document: US-style hearing with extension fields") {
  SourceDescriptor d;
  d.source_id = "us";
  d.country = "US";
  d.defaults = {{"parliament_name", "House of Representatives"}};
  d.extraction_rules = {
      regex_rule("meeting_id", "Hearing ID: ([A-Z0-9-]+)"),
      regex_rule("committee_id", "Hearing ID: [A-Z]+-([A-Z]+)-"),
      regex_rule("committee_name", "COMMITTEE ON ([A-Z ]+)\\n", RulePostprocess::Trim),
      regex_rule("date", "HEARING HELD (.+)\\n", RulePostprocess::ParseDate),
      regex_rule("serial_numbers", "Serial Nos: (.+)\\n", RulePostprocess::SplitList),
      regex_rule("witnesses", "Witnesses: (.+)\\n", RulePostprocess::SplitList),
      regex_rule("location_id", "Location ID: ([A-Z0-9-]+)"),
      regex_rule("committee_members", "Members present: (.+)\\n", RulePostprocess::SplitList),
  };
  d.extraction_rules[4].delimiter = ";";
  d.extraction_rules[5].delimiter = ";";
  d.extraction_rules[7].delimiter = ";";

  RawDocument doc;
  doc.source_id = "us";
  doc.native_id = "h1.txt";
  doc.body =
      "COMMITTEE ON ENERGY AND COMMERCE\n"
      "Hearing ID: USHE-ENER-2010-017\n"
      "Serial Nos: 111-119; 111-120\n"
      "HEARING HELD June 15, 2010\n"
      "Location ID: RHOB-2123\n"
      "Witnesses: T. Hayward; L. McKay\n"
      "Members present: H. Waxman; J. Barton\n"
      "...transcript...\n";

  auto result = parse_document(doc, d);
  REQUIRE(std::holds_alternative<ProtocolRecord>(result));
  const auto& r = std::get<ProtocolRecord>(result);
  CHECK(r.country == "US");
  CHECK(r.committee_id == "ENER");
  CHECK(r.committee_name == "ENERGY AND COMMERCE");
  CHECK(r.date.iso() == "2010-06-15");
  CHECK(r.committee_members == std::vector<std::string>{"H. Waxman", "J. Barton"});
  CHECK(r.document_length == utf8_length(doc.body));
  CHECK(std::get<std::vector<std::string>>(r.extensions.at("serial_numbers")) ==
        std::vector<std::string>{"111-119", "111-120"});
  CHECK(std::get<std::vector<std::string>>(r.extensions.at("witnesses")) ==
        std::vector<std::string>{"T. Hayward", "L. McKay"});
  CHECK(std::get<std::string>(r.extensions.at("location_id")) == "RHOB-2123");
  CHECK(validate_record(r).empty());
}

TEST_CASE("parse_document: missing date is a failure naming the field") {
  auto d = il_like_descriptor();
  auto doc = il_doc("m1", "2020-01-05");
  doc.sidecar.erase("date");
  auto result = parse_document(doc, d);
  REQUIRE(std::holds_alternative<ParseFailure>(result));
  CHECK(std::get<ParseFailure>(result).missing_fields ==
        std::vector<std::string>{"date"});
}

TEST_CASE("parse_document: unparseable date is reported like a missing one") {
  auto d = il_like_descriptor();
  auto doc = il_doc("m1", "2020-13-01");
  auto result = parse_document(doc, d);
  REQUIRE(std::holds_alternative<ParseFailure>(result));
  CHECK(std::get<ParseFailure>(result).missing_fields ==
        std::vector<std::string>{"date"});
}

TEST_CASE("parse_document: patched classified meeting has length 0") {
  auto d = il_like_descriptor();
  RawDocument doc;
  doc.source_id = "il";
  doc.native_id = "m9";
  doc.body = "";  // file was never downloadable
  doc.sidecar = {{"id", "m9"}, {"committee_id", "def"}, {"date", "2014-06-10"}};
  auto result = parse_document(doc, d);
  REQUIRE(std::holds_alternative<ProtocolRecord>(result));
  const auto& r = std::get<ProtocolRecord>(result);
  CHECK(r.document_length == 0);
  CHECK(r.committee_members.empty());
  CHECK(validate_record(r).empty());
}

TEST_CASE("parse_document: sidecar wins over a body-derived value") {
  auto d = il_like_descriptor();
  d.extraction_rules.push_back(regex_rule("committee_id", "committee=(\\w+)"));
  auto doc = il_doc("m1", "2020-01-05", "committee=wrong_one");
  auto result = parse_document(doc, d);
  REQUIRE(std::holds_alternative<ProtocolRecord>(result));
  CHECK(std::get<ProtocolRecord>(result).committee_id == "fin");
}

TEST_CASE("parse_document: member lists deduplicate preserving order") {
  auto d = il_like_descriptor();
  auto result = parse_document(il_doc("m1", "2020-01-05"), d);
  const auto& r = std::get<ProtocolRecord>(result);
  CHECK(r.parliament_members == std::vector<std::string>{"MK One", "MK Two"});
}

TEST_CASE("parse_corpus partitions the input") {
  auto d = il_like_descriptor();
  std::vector<RawDocument> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(il_doc("m" + std::to_string(i), "2020-01-05"));
  docs[3].sidecar.erase("id");       // no meeting_id
  docs[7].sidecar.erase("id");

  auto out = parse_corpus(docs, d);
  CHECK(out.records.size() == 8);
  CHECK(out.failures.size() == 2);
  CHECK(out.records.size() + out.failures.size() == docs.size());
  for (const auto& f : out.failures)
    CHECK(f.missing_fields == std::vector<std::string>{"meeting_id"});
}

TEST_CASE("parse_corpus: clean corpus has no failures") {
  auto d = il_like_descriptor();
  std::vector<RawDocument> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(il_doc("m" + std::to_string(i), "2020-01-05"));
  auto out = parse_corpus(docs, d);
  CHECK(out.records.size() == 10);
  CHECK(out.failures.empty());
}

TEST_CASE("parse_corpus handles a full-scrape sized input") {
  auto d = il_like_descriptor();
  std::vector<RawDocument> docs;
  docs.reserve(35800);
  for (int i = 0; i < 35800; ++i) {
    auto doc = il_doc("m" + std::to_string(i), "2015-03-02", "p");
    docs.push_back(std::move(doc));
  }
  auto out = parse_corpus(docs, d);
  CHECK(out.records.size() == 35800);
  CHECK(out.failures.empty());
}

TEST_CASE("re-parsing a serialized corpus is the identity") {
  auto d = il_like_descriptor();
  std::vector<RawDocument> docs;
  for (int i = 0; i < 5; ++i)
    docs.push_back(il_doc("m" + std::to_string(i), "2019-0" + std::to_string(i + 1) + "-10"));
  auto first = parse_corpus(docs, d);
  std::string jsonl;
  for (const auto& r : first.records) jsonl += record_to_json(r).dump() + "\n";
  std::vector<ProtocolRecord> reparsed;
  for (const auto& line : split(jsonl, '\n'))
    if (!line.empty()) reparsed.push_back(record_from_json(Json::parse(line)));
  CHECK(reparsed == first.records);
}
