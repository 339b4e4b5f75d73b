#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "doctest.h"
#include "lexmt/lm.hpp"

using namespace lexmt;

namespace {

std::vector<Tokens> sentences(std::initializer_list<const char*> lines) {
  std::vector<Tokens> out;
  for (const char* l : lines) out.push_back(split_ws(l));
  return out;
}

std::vector<Tokens> random_corpus(std::mt19937_64& rng, std::size_t n_sents,
                                  std::size_t vocab, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), w(0, vocab - 1);
  std::vector<Tokens> out;
  for (std::size_t k = 0; k < n_sents; ++k) {
    Tokens s;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i)
      s.push_back("w" + std::to_string(w(rng)));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("ngram counting pads each sentence once") {
  auto counts = count_ngrams(sentences({"a b", "a"}), 2);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0].at({"<s>"}) == 2);
  CHECK(counts[0].at({"a"}) == 2);
  CHECK(counts[0].at({"b"}) == 1);
  CHECK(counts[0].at({"</s>"}) == 2);
  CHECK(counts[0].size() == 4);
  CHECK(counts[1].at({"<s>", "a"}) == 2);
  CHECK(counts[1].at({"a", "b"}) == 1);
  CHECK(counts[1].at({"b", "</s>"}) == 1);
  CHECK(counts[1].at({"a", "</s>"}) == 1);
  CHECK(counts[1].size() == 4);
}

TEST_CASE("ngram counting is additive over corpora") {
  std::mt19937_64 rng(59);
  auto a = random_corpus(rng, 8, 4, 5);
  auto b = random_corpus(rng, 8, 4, 5);
  auto both = a;
  both.insert(both.end(), b.begin(), b.end());
  auto ca = count_ngrams(a, 3), cb = count_ngrams(b, 3),
       cab = count_ngrams(both, 3);
  for (int n = 0; n < 3; ++n) {
    std::map<Tokens, long long> sum = ca[n];
    for (const auto& [g, c] : cb[n]) sum[g] += c;
    CHECK(sum == cab[n]);
  }
}

TEST_CASE("a certain continuation costs nothing") {
  std::vector<Tokens> corpus(10, Tokens{"a", "a"});
  NGramModel m = train_lm(corpus, 3);
  CHECK(m.cond_logp({NGramModel::kBos}, "a") == 0.0);
  CHECK(m.cond_logp({NGramModel::kBos, "a"}, "a") == 0.0);
}

TEST_CASE("unigram probabilities sum to one, leftovers fund <unk>") {
  std::vector<Tokens> corpus = {
      split_ws("w0 w1 w2 w3 w4 w5 w6 w7 w8 w9"),
      split_ws("x x x x x x"),
  };
  NGramModel m = train_lm(corpus, 2);
  double sum = 0.0;
  for (const auto& [g, e] : m.grams[0]) sum += std::pow(10.0, e.logp);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::pow(10.0, m.grams[0].at(NGramModel::kUnk).logp) > 0.01);
  CHECK(m.grams[0].at(NGramModel::kBos).logp == NGramModel::kLogFloor);
}

TEST_CASE("every context distribution sums to one") {
  // Summing p(w | ctx) over the whole event vocabulary (everything except
  // <s>) must give 1 for the empty context and for every observed context
  // of every order, including saturated ones where backoff has no mass to
  // hand down.
  std::mt19937_64 rng(61);
  for (int it = 0; it < 5; ++it) {
    NGramModel m = train_lm(random_corpus(rng, 25, 5, 6), 3);
    std::vector<std::string> events;
    for (const auto& [g, e] : m.grams[0])
      if (g != NGramModel::kBos) events.push_back(g);

    auto sum_over_events = [&](const Tokens& ctx) {
      double sum = 0.0;
      for (const std::string& w : events)
        sum += std::pow(10.0, m.cond_logp(ctx, w));
      return sum;
    };

    CHECK(sum_over_events({}) == doctest::Approx(1.0).epsilon(1e-9));

    for (int n = 2; n <= 3; ++n) {
      std::set<std::string> contexts;
      for (const auto& [g, e] : m.grams[n - 1]) {
        auto cut = g.rfind(' ');
        if (cut != std::string::npos) contexts.insert(g.substr(0, cut));
      }
      for (const std::string& ctx_str : contexts)
        CHECK(sum_over_events(split_ws(ctx_str)) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("backoff reaches the unknown word") {
  NGramModel m = train_lm(sentences({"a b c", "a b d", "e"}), 3);
  CHECK(m.vocab_map("a") == "a");
  CHECK(m.vocab_map("zzz") == "<unk>");
  // fresh context backs off all the way to the unigram table
  double got = m.cond_logp({"zzz", "zzz"}, m.vocab_map("qqq"));
  CHECK(got == m.grams[0].at(NGramModel::kUnk).logp);
  // raw unseen tokens are the caller's problem: floor, not <unk>
  CHECK(m.cond_logp({}, "qqq") == NGramModel::kLogFloor);
}

TEST_CASE("frequent orders outscore rare ones") {
  std::vector<Tokens> corpus(5, Tokens{"a", "b"});
  corpus.push_back({"b", "a"});
  NGramModel m = train_lm(corpus, 2);
  CHECK(m.cond_logp({"a"}, "b") > m.cond_logp({"b"}, "a"));
}

TEST_CASE("the training sentence beats all its permutations") {
  NGramModel m = train_lm(sentences({"the quick brown fox"}), 3);
  Tokens words = split_ws("the quick brown fox");
  double trained = m.score_sequence(words);
  Tokens perm = words;
  std::sort(perm.begin(), perm.end());
  int others = 0;
  do {
    if (perm == words) continue;
    ++others;
    CHECK(m.score_sequence(perm) < trained);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(others == 23);
}

TEST_CASE("scoring an empty sequence is one end-of-sentence step") {
  NGramModel m = train_lm(sentences({"a b", "b"}), 3);
  CHECK(m.score_sequence({}) == m.cond_logp({NGramModel::kBos}, NGramModel::kEos));
  CHECK(score_sequence(m, {}) == m.score_sequence({}));
  // OOV tokens are mapped before scoring, so the result stays finite
  CHECK(m.score_sequence({"a", "zzz"}) > 3 * NGramModel::kLogFloor);
}

TEST_CASE("training rejects degenerate input") {
  CHECK_THROWS(train_lm({}, 3));
  CHECK_THROWS(train_lm(sentences({"a b"}), 0));
}

TEST_CASE("arpa files round trip byte for byte") {
  std::mt19937_64 rng(67);
  NGramModel m = train_lm(random_corpus(rng, 30, 6, 6), 3);
  std::string p1 = "/tmp/lexmt_test_lm1.arpa", p2 = "/tmp/lexmt_test_lm2.arpa";
  save_arpa(m, p1);
  NGramModel loaded = load_arpa(p1);
  save_arpa(loaded, p2);
  CHECK(read_file(p1) == read_file(p2));
  CHECK(loaded.order == m.order);

  // queries through the reloaded model stay within text precision
  std::uniform_int_distribution<std::size_t> w(0, 6), clen(0, 2);
  NGramModel reloaded = load_arpa(p2);
  for (int q = 0; q < 1000; ++q) {
    Tokens ctx;
    std::size_t n = clen(rng);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = w(rng);
      ctx.push_back(k == 6 ? "<s>" : "w" + std::to_string(k));
    }
    std::size_t k = w(rng);
    std::string word = k == 6 ? "</s>" : "w" + std::to_string(k);
    word = m.vocab_map(word);
    double orig = m.cond_logp(ctx, word);
    double from_text = loaded.cond_logp(ctx, word);
    CHECK(std::abs(orig - from_text) <= 1e-4);
    CHECK(from_text == reloaded.cond_logp(ctx, word));
  }
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("arpa loader rejects malformed files") {
  std::string p = "/tmp/lexmt_test_lm_bad.arpa";
  write_file(p, "no header here\n");
  CHECK_THROWS(load_arpa(p));
  write_file(p, "\\data\\\nngram 1=2\n\n\\1-grams:\n-0.5\ta\n\n\\end\\\n");
  CHECK_THROWS(load_arpa(p));  // declared 2, found 1
  std::remove(p.c_str());
}
