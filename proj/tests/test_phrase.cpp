#include <cstdio>
#include <random>

#include "doctest.h"
#include "lexmt/phrase.hpp"
#include "lexmt/util.hpp"

using namespace lexmt;

namespace {

SentencePair pair(std::initializer_list<const char*> src,
                  std::initializer_list<const char*> tgt) {
  SentencePair p;
  for (const char* s : src) p.source.push_back(s);
  for (const char* t : tgt) p.target.push_back(t);
  return p;
}

AlignmentMatrix matrix(std::size_t ns, std::size_t nt,
                       std::initializer_list<std::pair<std::size_t, std::size_t>> links) {
  AlignmentMatrix a;
  a.src_len = ns;
  a.tgt_len = nt;
  for (auto& l : links) a.links.insert(l);
  return a;
}

ExtractedPhrase ep(std::initializer_list<const char*> src,
                   std::initializer_list<const char*> tgt,
                   std::initializer_list<std::pair<std::size_t, std::size_t>> links) {
  ExtractedPhrase e;
  for (const char* s : src) e.src.push_back(s);
  for (const char* t : tgt) e.tgt.push_back(t);
  for (auto& l : links) e.links.insert(l);
  return e;
}

// Direct enumeration of every consistent box, no span tricks.
std::vector<ExtractedPhrase> extract_oracle(const SentencePair& p,
                                            const AlignmentMatrix& a,
                                            std::size_t max_len) {
  std::vector<ExtractedPhrase> out;
  const std::size_t n = p.source.size(), m = p.target.size();
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = i1; i2 < n && i2 - i1 + 1 <= max_len; ++i2)
      for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = j1; j2 < m && j2 - j1 + 1 <= max_len; ++j2) {
          bool any = false, ok = true;
          for (const auto& [i, j] : a.links) {
            bool in_i = i >= i1 && i <= i2, in_j = j >= j1 && j <= j2;
            if (in_i && in_j) any = true;
            if (in_i != in_j) ok = false;
          }
          if (!any || !ok) continue;
          ExtractedPhrase e;
          e.src.assign(p.source.begin() + i1, p.source.begin() + i2 + 1);
          e.tgt.assign(p.target.begin() + j1, p.target.begin() + j2 + 1);
          for (const auto& [i, j] : a.links)
            if (i >= i1 && i <= i2) e.links.insert({i - i1, j - j1});
          out.push_back(std::move(e));
        }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("extraction on a two-word diagonal") {
  auto got = extract_phrases(pair({"a", "b"}, {"x", "y"}),
                             matrix(2, 2, {{0, 0}, {1, 1}}), 2);
  std::vector<ExtractedPhrase> want = {
      ep({"a"}, {"x"}, {{0, 0}}),
      ep({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 1}}),
      ep({"b"}, {"y"}, {{0, 0}}),
  };
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  CHECK(extract_phrases(pair({"a", "b"}, {"x", "y"}),
                        matrix(2, 2, {{0, 0}, {1, 1}}), 1) ==
        std::vector<ExtractedPhrase>{ep({"a"}, {"x"}, {{0, 0}}),
                                     ep({"b"}, {"y"}, {{0, 0}})});
}

TEST_CASE("extraction with no links yields nothing") {
  CHECK(extract_phrases(pair({"a"}, {"x"}), matrix(1, 1, {}), 7).empty());
}

TEST_CASE("unaligned target words extend phrases") {
  auto got = extract_phrases(pair({"a", "b"}, {"x", "u", "y"}),
                             matrix(2, 3, {{0, 0}, {1, 2}}), 7);
  std::vector<ExtractedPhrase> want = {
      ep({"a"}, {"x"}, {{0, 0}}),
      ep({"a"}, {"x", "u"}, {{0, 0}}),
      ep({"b"}, {"y"}, {{0, 0}}),
      ep({"b"}, {"u", "y"}, {{0, 1}}),
      ep({"a", "b"}, {"x", "u", "y"}, {{0, 0}, {1, 2}}),
  };
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  // length cap applies to the extended target span too
  auto capped = extract_phrases(pair({"a", "b"}, {"x", "u", "y"}),
                                matrix(2, 3, {{0, 0}, {1, 2}}), 2);
  CHECK(capped.size() == 4);
}

TEST_CASE("extraction equals the box-enumeration oracle") {
  static const char* kSrc[] = {"s0", "s1", "s2", "s3"};
  static const char* kTgt[] = {"t0", "t1", "t2", "t3"};
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> len(1, 6), ml(1, 7);
  std::bernoulli_distribution link(0.3);
  for (int it = 0; it < 300; ++it) {
    SentencePair p;
    std::size_t ns = len(rng), nt = len(rng);
    for (std::size_t i = 0; i < ns; ++i) p.source.push_back(kSrc[i % 4]);
    for (std::size_t j = 0; j < nt; ++j) p.target.push_back(kTgt[j % 4]);
    AlignmentMatrix a;
    a.src_len = ns;
    a.tgt_len = nt;
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j)
        if (link(rng)) a.links.insert({i, j});
    std::size_t max_len = ml(rng);
    CHECK(extract_phrases(p, a, max_len) == extract_oracle(p, a, max_len));
  }
}

TEST_CASE("good-turing adjusted counts") {
  auto gt = good_turing_discount({{1, 10}, {2, 5}});
  CHECK(gt(1) == doctest::Approx(1.0).epsilon(1e-12));  // 2*5/10
  CHECK(gt(2) == 2.0);                                  // no N_3: identity
  CHECK(gt(7) == 7.0);                                  // beyond cutoff

  auto gt2 = good_turing_discount({{1, 4}, {2, 2}, {3, 3}, {5, 1}, {6, 1}});
  CHECK(gt2(1) == doctest::Approx(1.0));        // 2*2/4
  CHECK(gt2(2) == 2.0);                         // 3*3/2 = 4.5 > 2: rejected
  CHECK(gt2(3) == 3.0);                         // no N_4
  CHECK(gt2(5) == 5.0);                         // at cutoff: identity
  CHECK(gt2(6) == 6.0);

  auto id = good_turing_discount({});
  CHECK(id(3) == 3.0);
}

TEST_CASE("good-turing never inflates a count") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<long long> r_max(1, 8), n_r(0, 20);
  for (int it = 0; it < 10; ++it) {
    CountHistogram hist;
    long long top = r_max(rng);
    for (long long r = 1; r <= top; ++r) {
      long long n = n_r(rng);
      if (n > 0) hist[r] = n;
    }
    auto gt = good_turing_discount(hist);
    for (long long r = 1; r <= top + 2; ++r) {
      CHECK(gt(r) > 0.0);
      CHECK(gt(r) <= static_cast<double>(r));
    }
  }
}

TEST_CASE("scoring a singleton pair") {
  TranslationTable fwd, rev;
  fwd.t["x"]["a"] = 1.0;
  rev.t["a"]["x"] = 1.0;
  PhraseTable table = score_phrases({ep({"a"}, {"x"}, {{0, 0}})}, fwd, rev);
  const auto* row = table.lookup("a");
  REQUIRE(row);
  REQUIRE(row->size() == 1);
  const PhraseEntry& pe = (*row)[0];
  CHECK(pe.phi_tgt_given_src == 1.0);
  CHECK(pe.phi_src_given_tgt == 1.0);
  CHECK(pe.lex_tgt_given_src == 1.0);
  CHECK(pe.lex_src_given_tgt == 1.0);
  CHECK(pe.joint == 1);
  CHECK(pe.src_marginal == 1);
  CHECK(pe.tgt_marginal == 1);
  CHECK(table.lookup("missing") == nullptr);
}

TEST_CASE("lexical weights average links and fall back to NULL") {
  // "a" -> "x y" with only x linked: lex(tgt|src) = t(x|a) * t(y|NULL)
  TranslationTable src_given_tgt, tgt_given_src;
  tgt_given_src.t["a"]["x"] = 0.8;
  tgt_given_src.t[TranslationTable::kNull]["y"] = 0.3;
  src_given_tgt.t["x"]["a"] = 0.6;
  PhraseTable table = score_phrases({ep({"a"}, {"x", "y"}, {{0, 0}})},
                                    src_given_tgt, tgt_given_src);
  const PhraseEntry& pe = (*table.lookup("a"))[0];
  CHECK(pe.lex_tgt_given_src == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(pe.lex_src_given_tgt == doctest::Approx(0.6).epsilon(1e-12));

  // doubly linked target word averages its two source probabilities
  TranslationTable tgs2, sgt2;
  tgs2.t["a"]["x"] = 0.8;
  tgs2.t["b"]["x"] = 0.4;
  sgt2.t["x"]["a"] = 0.5;
  sgt2.t["x"]["b"] = 0.9;
  PhraseTable t2 = score_phrases({ep({"a", "b"}, {"x"}, {{0, 0}, {1, 0}})},
                                 sgt2, tgs2);
  const PhraseEntry& pe2 = (*t2.lookup("a b"))[0];
  CHECK(pe2.lex_tgt_given_src == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(pe2.lex_src_given_tgt ==
        doctest::Approx(0.45).epsilon(1e-12));  // 0.5 * 0.9
}

TEST_CASE("unseen words hit the probability floor, not zero") {
  TranslationTable empty_fwd, empty_rev;
  PhraseTable table =
      score_phrases({ep({"a"}, {"x"}, {{0, 0}})}, empty_fwd, empty_rev);
  const PhraseEntry& pe = (*table.lookup("a"))[0];
  CHECK(pe.lex_tgt_given_src == 1e-12);
  CHECK(pe.lex_src_given_tgt == 1e-12);
}

TEST_CASE("the most frequent internal alignment wins, ties go smallest") {
  TranslationTable fwd, rev;
  std::vector<ExtractedPhrase> ex = {
      ep({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 1}}),
      ep({"a", "b"}, {"x", "y"}, {{0, 1}, {1, 0}}),
      ep({"a", "b"}, {"x", "y"}, {{0, 1}, {1, 0}}),
  };
  PhraseTable table = score_phrases(ex, fwd, rev);
  const PhraseEntry& pe = (*table.lookup("a b"))[0];
  CHECK(pe.links == PhraseLinks{{0, 1}, {1, 0}});
  CHECK(pe.joint == 3);

  // exact tie: lexicographically smallest link set
  ex.pop_back();
  PhraseTable tied = score_phrases(ex, fwd, rev);
  CHECK((*tied.lookup("a b"))[0].links == PhraseLinks{{0, 0}, {1, 1}});
}

TEST_CASE("scored tables respect count identities") {
  std::mt19937_64 rng(47);
  static const char* kSrc[] = {"s0", "s1", "s2"};
  static const char* kTgt[] = {"t0", "t1", "t2"};
  std::uniform_int_distribution<std::size_t> len(1, 5);
  std::bernoulli_distribution link(0.4);
  std::vector<SentencePair> corpus;
  std::vector<ExtractedPhrase> all;
  for (int k = 0; k < 60; ++k) {
    SentencePair p;
    std::size_t ns = len(rng), nt = len(rng);
    for (std::size_t i = 0; i < ns; ++i) p.source.push_back(kSrc[i % 3]);
    for (std::size_t j = 0; j < nt; ++j) p.target.push_back(kTgt[j % 3]);
    AlignmentMatrix a;
    a.src_len = ns;
    a.tgt_len = nt;
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j)
        if (link(rng)) a.links.insert({i, j});
    auto ex = extract_phrases(p, a, 4);
    all.insert(all.end(), ex.begin(), ex.end());
    corpus.push_back(p);
  }
  REQUIRE(!all.empty());
  std::vector<SentencePair> swapped;
  for (const SentencePair& p : corpus)
    swapped.push_back({p.target, p.source});
  TranslationTable fwd = train_model1(corpus, 3);
  TranslationTable rev = train_model1(swapped, 3);
  PhraseTable table = score_phrases(all, fwd, rev);

  long long total_joint = 0;
  for (const auto& [src, row] : table.entries) {
    long long src_sum = 0;
    double phi_sum = 0.0;
    for (const PhraseEntry& pe : row) {
      src_sum += pe.joint;
      total_joint += pe.joint;
      phi_sum += pe.phi_tgt_given_src;
      CHECK(pe.src_marginal == row[0].src_marginal);
      CHECK(pe.phi_tgt_given_src > 0.0);
      CHECK(pe.phi_tgt_given_src <= 1.0 + 1e-12);
      CHECK(pe.phi_src_given_tgt > 0.0);
      CHECK(pe.phi_src_given_tgt <= 1.0 + 1e-12);
      CHECK(pe.lex_tgt_given_src > 0.0);
      CHECK(pe.lex_tgt_given_src <= 1.0 + 1e-12);
      CHECK(pe.lex_src_given_tgt > 0.0);
      CHECK(pe.lex_src_given_tgt <= 1.0 + 1e-12);
    }
    CHECK(src_sum == row[0].src_marginal);
    CHECK(phi_sum <= 1.0 + 1e-9);
  }
  CHECK(total_joint == static_cast<long long>(all.size()));

  // target marginals sum consistently too
  std::map<std::string, long long> tgt_sum;
  std::map<std::string, long long> tgt_claim;
  for (const auto& [src, row] : table.entries)
    for (const PhraseEntry& pe : row) {
      tgt_sum[join(pe.tgt)] += pe.joint;
      tgt_claim[join(pe.tgt)] = pe.tgt_marginal;
    }
  for (const auto& [t, sum] : tgt_sum) CHECK(sum == tgt_claim[t]);
}

TEST_CASE("phrase table text round trip") {
  std::mt19937_64 rng(53);
  static const char* kSrc[] = {"s0", "s1"};
  static const char* kTgt[] = {"t0", "t1"};
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::bernoulli_distribution link(0.45);
  std::vector<ExtractedPhrase> all;
  std::vector<SentencePair> corpus, swapped;
  for (int k = 0; k < 25; ++k) {
    SentencePair p;
    std::size_t ns = len(rng), nt = len(rng);
    for (std::size_t i = 0; i < ns; ++i) p.source.push_back(kSrc[i % 2]);
    for (std::size_t j = 0; j < nt; ++j) p.target.push_back(kTgt[j % 2]);
    AlignmentMatrix a;
    a.src_len = ns;
    a.tgt_len = nt;
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j)
        if (link(rng)) a.links.insert({i, j});
    auto ex = extract_phrases(p, a, 3);
    all.insert(all.end(), ex.begin(), ex.end());
    corpus.push_back(p);
    swapped.push_back({p.target, p.source});
  }
  PhraseTable table = score_phrases(all, train_model1(corpus, 2),
                                    train_model1(swapped, 2));
  std::string p1 = "/tmp/lexmt_test_pt1.txt", p2 = "/tmp/lexmt_test_pt2.txt";
  save_phrase_table(table, p1);
  PhraseTable loaded = load_phrase_table(p1);
  save_phrase_table(loaded, p2);
  CHECK(read_file(p1) == read_file(p2));
  REQUIRE(loaded.entries.size() == table.entries.size());
  for (const auto& [src, row] : table.entries) {
    const auto* lrow = loaded.lookup(src);
    REQUIRE(lrow);
    REQUIRE(lrow->size() == row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      CHECK((*lrow)[i].tgt == row[i].tgt);
      CHECK((*lrow)[i].links == row[i].links);
      CHECK((*lrow)[i].joint == row[i].joint);
      CHECK((*lrow)[i].phi_tgt_given_src ==
            doctest::Approx(row[i].phi_tgt_given_src).epsilon(1e-5));
    }
  }
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("source vocabulary lists phrase-internal tokens") {
  PhraseTable table;
  table.entries["a b"].push_back({});
  table.entries["c"].push_back({});
  CHECK(table.source_vocabulary() == std::set<std::string>{"a", "b", "c"});
}
