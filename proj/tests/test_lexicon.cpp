#include <filesystem>

#include "doctest.h"
#include "lexmt/lexicon.hpp"
#include "lexmt/textprep.hpp"

using namespace lexmt;
namespace fs = std::filesystem;

namespace {

LexiconEntry entry(const char* src, const char* tgt,
                   ListKind kind = ListKind::dictionary) {
  LexiconEntry e;
  e.source_term = tokenize(src);
  e.target_term = tokenize(tgt);
  e.kind = kind;
  return e;
}

std::vector<SentencePair> corpus(std::initializer_list<const char*> lines) {
  std::vector<SentencePair> pairs;
  for (const char* l : lines) pairs.push_back({tokenize(l), {"x"}, Origin::corpus});
  return pairs;
}

}  // namespace

TEST_CASE("lexicon tsv round trip") {
  fs::path p = fs::temp_directory_path() / "lexmt_lex.tsv";
  std::vector<LexiconEntry> in = {entry("මිනිසා", "man"),
                                  entry("ඉඩම් කොමිෂන්", "land commission",
                                        ListKind::glossary)};
  in[0].common_singular_noun = true;
  in[1].article_override = "an";
  save_lexicon(p, in);
  std::vector<LexiconEntry> out = load_lexicon(p);
  REQUIRE(out.size() == 2);
  CHECK(out[0].source_term == Tokens{"මිනිසා"});
  CHECK(out[0].common_singular_noun);
  CHECK(out[1].kind == ListKind::glossary);
  CHECK(out[1].article_override == "an");
  fs::remove(p);
}

TEST_CASE("lexicon load rejects malformed rows") {
  fs::path p = fs::temp_directory_path() / "lexmt_lex_bad.tsv";
  write_file(p, "onlyonecolumn\n");
  CHECK_THROWS(load_lexicon(p));
  write_file(p, "a\tb\tnot_a_kind\n");
  CHECK_THROWS(load_lexicon(p));
  fs::remove(p);
}

TEST_CASE("token filtration removes corpus-covered entries") {
  std::vector<SentencePair> train = corpus({"සභාව රැස් විය", "අද හොඳ දවසක්"});
  std::vector<LexiconEntry> entries = {
      entry("සභාව", "council"),          // in corpus -> removed
      entry("කොමිසම", "commission"),     // absent -> kept
      entry("සභාව රැස්", "assembly")};   // all tokens known -> removed
  auto [kept, report] = filter_list(entries, train, FilterMode::token);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].source_surface() == "කොමිසම");
  CHECK(report.kept == 1);
  CHECK(report.removed == 2);
  REQUIRE(report.rows.size() == 3);
  CHECK_FALSE(report.rows[0].kept);
  CHECK(report.rows[1].kept);
}

TEST_CASE("phrase filtration needs a contiguous match") {
  std::vector<SentencePair> train = corpus({"ක ඛ ග", "ඝ ඞ"});
  // both tokens known but never adjacent: token mode removes, phrase keeps
  std::vector<LexiconEntry> entries = {entry("ක ග", "x")};
  CHECK(filter_list(entries, train, FilterMode::token).first.empty());
  CHECK(filter_list(entries, train, FilterMode::phrase).first.size() == 1);
  // contiguous occurrence is removed in phrase mode too
  std::vector<LexiconEntry> entries2 = {entry("ක ඛ", "y")};
  CHECK(filter_list(entries2, train, FilterMode::phrase).first.empty());
}

TEST_CASE("filtration with empty corpus keeps everything") {
  std::vector<LexiconEntry> entries = {entry("a", "x"), entry("b", "y")};
  auto [kept, report] = filter_list(entries, {}, FilterMode::token);
  CHECK(kept.size() == 2);
  CHECK(report.removed == 0);
}

TEST_CASE("filtration is idempotent and mode off is identity") {
  std::vector<SentencePair> train = corpus({"a b", "c"});
  std::vector<LexiconEntry> entries = {entry("a", "x"), entry("z", "y")};
  auto [once, r1] = filter_list(entries, train, FilterMode::token);
  auto [twice, r2] = filter_list(once, train, FilterMode::token);
  CHECK(once.size() == twice.size());
  CHECK(r2.removed == 0);
  CHECK(filter_list(entries, train, FilterMode::off).first.size() == 2);
}

TEST_CASE("filter report tsv") {
  FilterReport report;
  report.kept = 1;
  report.removed = 1;
  report.rows = {{"a ||| x", true, ""}, {"b ||| y", false, "all tokens in corpus"}};
  fs::path p = fs::temp_directory_path() / "lexmt_filter_report.tsv";
  write_filter_report(p, report);
  std::vector<std::string> lines = read_lines(p);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "a ||| x\tkept\t");
  CHECK(lines[1] == "b ||| y\tremoved\tall tokens in corpus");
  fs::remove(p);
}

TEST_CASE("integrate appends list entries after the corpus") {
  std::vector<SentencePair> train;
  for (int i = 0; i < 100; ++i) train.push_back({{"s"}, {"t"}, Origin::corpus});
  std::vector<LexiconEntry> lists;
  for (int i = 0; i < 10; ++i) lists.push_back(entry("a", "x"));
  std::vector<SentencePair> out = integrate(train, lists);
  REQUIRE(out.size() == 110);
  CHECK(out[99].origin == Origin::corpus);
  CHECK(out[100].origin == Origin::list);
  CHECK(out[100].source == Tokens{"a"});
  CHECK(integrate(train, {}).size() == train.size());
}

TEST_CASE("integrate marks augmented entries") {
  LexiconEntry e = entry("b", "y");
  e.origin = Origin::augmented_list;
  std::vector<SentencePair> out = integrate({}, {e});
  REQUIRE(out.size() == 1);
  CHECK(out[0].origin == Origin::augmented_list);
}

TEST_CASE("integration grows the training vocabulary") {
  std::vector<SentencePair> train = corpus({"ක ඛ", "ග"});
  std::vector<LexiconEntry> lists = {entry("ඝ", "new")};
  Vocabulary before = build_vocab(train, Side::source);
  Vocabulary after = build_vocab(integrate(train, lists), Side::source);
  CHECK(after.counts.size() == before.counts.size() + 1);
}
