#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "doctest.h"
#include "lexmt/decoder.hpp"

using namespace lexmt;

namespace {

void add_entry(PhraseTable& table, const std::string& src,
               const std::string& tgt, double phi_fwd, double phi_rev,
               double lex_fwd, double lex_rev) {
  PhraseEntry pe;
  pe.tgt = split_ws(tgt);
  pe.phi_tgt_given_src = phi_fwd;
  pe.phi_src_given_tgt = phi_rev;
  pe.lex_tgt_given_src = lex_fwd;
  pe.lex_src_given_tgt = lex_rev;
  pe.joint = 1;
  pe.src_marginal = 1;
  pe.tgt_marginal = 1;
  table.entries[src].push_back(std::move(pe));
}

void add_entry(PhraseTable& table, const std::string& src,
               const std::string& tgt, double p) {
  add_entry(table, src, tgt, p, p, p, p);
}

struct OracleOption {
  std::size_t start = 0, end = 0;
  Tokens tgt;
  std::array<double, 4> scores{};
  bool oov = false;
};

struct OraclePath {
  Tokens target;
  FeatureVector feats{};
  double total = 0.0;
  std::vector<bool> flags;
  std::string str;
};

// Every way of segmenting and reordering the source with table phrases and
// passthrough copies, scored feature by feature from first principles.
class ExhaustiveDecoder {
 public:
  ExhaustiveDecoder(const Tokens& src, const PhraseTable& table,
                    const NGramModel& lm, const FeatureWeights& weights,
                    int distortion_limit)
      : src_(src), lm_(lm), weights_(weights), dlimit_(distortion_limit) {
    auto guard = [](double p) { return p < 1e-99 ? -99.0 : std::log10(p); };
    for (std::size_t i = 0; i < src.size(); ++i) {
      std::string surface;
      for (std::size_t j = i; j < src.size(); ++j) {
        if (j > i) surface += ' ';
        surface += src[j];
        const auto* row = table.lookup(surface);
        if (!row) continue;
        for (const PhraseEntry& pe : *row) {
          OracleOption o;
          o.start = i;
          o.end = j + 1;
          o.tgt = pe.tgt;
          o.scores = {guard(pe.phi_tgt_given_src), guard(pe.phi_src_given_tgt),
                      guard(pe.lex_tgt_given_src), guard(pe.lex_src_given_tgt)};
          opts_.push_back(std::move(o));
        }
      }
    }
    std::vector<bool> coverable(src.size(), false);
    for (const OracleOption& o : opts_)
      for (std::size_t k = o.start; k < o.end; ++k) coverable[k] = true;
    std::set<std::string> vocab = table.source_vocabulary();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (coverable[i]) continue;
      OracleOption o;
      o.start = i;
      o.end = i + 1;
      o.tgt = {src[i]};
      o.oov = vocab.count(src[i]) == 0;
      opts_.push_back(std::move(o));
    }
  }

  // All complete translations, best derivation per distinct target string,
  // sorted the way the n-best contract promises.
  std::vector<OraclePath> run() {
    paths_.clear();
    OraclePath start;
    std::vector<bool> cov(src_.size(), false);
    dfs(cov, {NGramModel::kBos}, 0, 0, start);
    std::map<std::string, OraclePath> best;
    for (const OraclePath& p : paths_) {
      auto it = best.find(p.str);
      if (it == best.end() || p.total > it->second.total ||
          (p.total == it->second.total && p.feats < it->second.feats))
        best[p.str] = p;
    }
    std::vector<OraclePath> out;
    for (auto& [s, p] : best) out.push_back(p);
    std::sort(out.begin(), out.end(), [](const OraclePath& a,
                                         const OraclePath& b) {
      if (a.total != b.total) return a.total > b.total;
      if (a.str != b.str) return a.str < b.str;
      return a.feats < b.feats;
    });
    return out;
  }

 private:
  void dfs(std::vector<bool>& cov, Tokens ctx, std::size_t last,
           std::size_t covered, OraclePath cur) {
    if (covered == src_.size()) {
      Tokens mapped;
      for (const std::string& t : ctx) mapped.push_back(lm_.vocab_map(t));
      cur.feats[4] += lm_.cond_logp(mapped, NGramModel::kEos);
      cur.total = weights_.dot(cur.feats);
      cur.str = join(cur.target);
      paths_.push_back(cur);
      return;
    }
    for (const OracleOption& o : opts_) {
      bool overlap = false;
      for (std::size_t k = o.start; k < o.end && !overlap; ++k)
        overlap = cov[k];
      if (overlap) continue;
      std::ptrdiff_t jump = static_cast<std::ptrdiff_t>(o.start) -
                            static_cast<std::ptrdiff_t>(last);
      if (jump < 0) jump = -jump;
      if (dlimit_ >= 0 && jump > dlimit_) continue;

      OraclePath next = cur;
      for (std::size_t k = 0; k < 4; ++k) next.feats[k] += o.scores[k];
      Tokens c;
      for (const std::string& t : ctx) c.push_back(lm_.vocab_map(t));
      double lm_sum = 0.0;
      for (const std::string& t : o.tgt) {
        lm_sum += lm_.cond_logp(c, lm_.vocab_map(t));
        c.push_back(lm_.vocab_map(t));
        if (c.size() > 2) c.erase(c.begin());
      }
      next.feats[4] += lm_sum;
      next.feats[5] += -static_cast<double>(jump);
      next.feats[6] += static_cast<double>(o.tgt.size());
      next.feats[7] += 1.0;
      for (const std::string& t : o.tgt) {
        next.target.push_back(t);
        next.flags.push_back(o.oov);
      }
      Tokens nctx = ctx;
      for (const std::string& t : o.tgt) {
        nctx.push_back(t);
        if (nctx.size() > 2) nctx.erase(nctx.begin());
      }
      for (std::size_t k = o.start; k < o.end; ++k) cov[k] = true;
      dfs(cov, nctx, o.end, covered + (o.end - o.start), next);
      for (std::size_t k = o.start; k < o.end; ++k) cov[k] = false;
    }
  }

  Tokens src_;
  std::vector<OracleOption> opts_;
  const NGramModel& lm_;
  const FeatureWeights& weights_;
  int dlimit_;
  std::vector<OraclePath> paths_;
};

NGramModel tiny_lm(std::initializer_list<const char*> lines) {
  std::vector<Tokens> corpus;
  for (const char* l : lines) corpus.push_back(split_ws(l));
  return train_lm(corpus, 3);
}

}  // namespace

TEST_CASE("empty source yields the empty derivation") {
  PhraseTable table;
  NGramModel lm = tiny_lm({"x"});
  Derivation d = decode({}, table, lm, FeatureWeights{});
  CHECK(d.target.empty());
  CHECK(d.total == 0.0);
  CHECK(d.oov_passthrough_count() == 0);
  CHECK_THROWS(nbest({"a"}, table, lm, FeatureWeights{}, 0));
}

TEST_CASE("passthrough flags distinguish unknown from uncoverable") {
  PhraseTable table;
  add_entry(table, "a b", "x", 0.9);
  NGramModel lm = tiny_lm({"x"});
  // "b" appears inside a source phrase but nothing covers it alone;
  // "q" is nowhere in the table at all
  Derivation d = decode({"b", "q"}, table, lm, FeatureWeights{});
  CHECK(d.target == Tokens{"b", "q"});
  REQUIRE(d.oov_flags.size() == 2);
  CHECK(d.oov_flags[0] == false);
  CHECK(d.oov_flags[1] == true);
  CHECK(d.oov_passthrough_count() == 1);

  Derivation cov = decode({"a", "b"}, table, lm, FeatureWeights{});
  CHECK(cov.target == Tokens{"x"});
  CHECK(cov.oov_passthrough_count() == 0);
}

TEST_CASE("the language model breaks phrase-score ties") {
  PhraseTable table;
  add_entry(table, "a", "p", 0.5);
  add_entry(table, "a", "q", 0.5);
  NGramModel lm = tiny_lm({"p p", "p p"});
  Derivation d = decode({"a"}, table, lm, FeatureWeights{});
  CHECK(d.target == Tokens{"p"});
}

TEST_CASE("n-best enumerates synonym combinations in score order") {
  PhraseTable table;
  add_entry(table, "a", "x", 0.9);
  add_entry(table, "a", "y", 0.3);
  add_entry(table, "b", "u", 0.8);
  add_entry(table, "b", "v", 0.4);
  NGramModel lm = tiny_lm({"x u"});
  FeatureWeights w;
  w.lm = 0.0;  // rank purely by phrase scores
  DecoderParams params;
  params.distortion_limit = 0;  // monotone only
  auto list = nbest({"a", "b"}, table, lm, w, 10, params);
  REQUIRE(list.size() == 4);
  CHECK(join(list[0].target) == "x u");
  CHECK(join(list[1].target) == "x v");
  CHECK(join(list[2].target) == "y u");
  CHECK(join(list[3].target) == "y v");
  for (std::size_t i = 1; i < 4; ++i) CHECK(list[i - 1].total > list[i].total);
  for (const Derivation& d : list) {
    CHECK(d.total == w.dot(d.features));  // recomputed, bit-exact
    CHECK(d.features[5] == 0.0);          // no reordering allowed
    CHECK(d.features[6] == 2.0);
    CHECK(d.features[7] == 2.0);
    CHECK(d.oov_passthrough_count() == 0);
  }
  CHECK(list[0].features[0] ==
        doctest::Approx(std::log10(0.9) + std::log10(0.8)).epsilon(1e-12));
  // the lm feature is still reported even at weight zero
  CHECK(list[0].features[4] ==
        doctest::Approx(lm.score_sequence({"x", "u"})).epsilon(1e-12));

  // asking for fewer returns a prefix
  auto two = nbest({"a", "b"}, table, lm, w, 2, params);
  REQUIRE(two.size() == 2);
  CHECK(join(two[0].target) == "x u");
  CHECK(join(two[1].target) == "x v");
}

TEST_CASE("decoding matches exhaustive search on random instances") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> prob(0.05, 0.95), wdist(-1.5, 1.5);
  std::uniform_int_distribution<std::size_t> slen(1, 4), widx(0, 3),
      tcount(1, 2);
  std::uniform_int_distribution<int> dl_pick(0, 2);
  std::bernoulli_distribution oov_tok(0.15), extra(0.5), bigram(0.4);
  const std::string svoc[4] = {"s0", "s1", "s2", "s3"};
  const std::string tvoc[4] = {"t0", "t1", "t2", "t3"};
  NGramModel lm = tiny_lm({"t0 t1 t2", "t1 t0", "t2 t3 t0", "t0 t1"});
  DecoderParams exact;
  exact.stack_size = 100000;

  for (int it = 0; it < 40; ++it) {
    PhraseTable table;
    for (int i = 0; i < 4; ++i) {
      add_entry(table, svoc[i], tvoc[widx(rng)], prob(rng), prob(rng),
                prob(rng), prob(rng));
      if (extra(rng)) {
        std::string tgt = tvoc[widx(rng)];
        if (tcount(rng) == 2) tgt += " " + tvoc[widx(rng)];
        add_entry(table, svoc[i], tgt, prob(rng), prob(rng), prob(rng),
                  prob(rng));
      }
      if (bigram(rng))
        add_entry(table, svoc[i] + " " + svoc[(i + 1) % 4], tvoc[widx(rng)],
                  prob(rng), prob(rng), prob(rng), prob(rng));
    }
    Tokens src;
    std::size_t n = slen(rng);
    for (std::size_t i = 0; i < n; ++i)
      src.push_back(oov_tok(rng) ? "zz9" : svoc[widx(rng)]);

    FeatureWeights w;
    {
      FeatureVector v;
      for (double& x : v) x = wdist(rng);
      w = FeatureWeights::from_array(v);
    }
    int pick = dl_pick(rng);
    exact.distortion_limit = pick == 0 ? -1 : (pick == 1 ? 0 : 2);

    ExhaustiveDecoder oracle(src, table, lm, w, exact.distortion_limit);
    auto want = oracle.run();
    REQUIRE(!want.empty());

    Derivation got = decode(src, table, lm, w, exact);
    CHECK(got.total == doctest::Approx(want[0].total).epsilon(1e-9));
    if (want.size() == 1 || want[0].total - want[1].total > 1e-6) {
      CHECK(join(got.target) == want[0].str);
      CHECK(got.oov_flags == want[0].flags);
    }

    std::size_t k = std::min<std::size_t>(want.size(), 5);
    auto list = nbest(src, table, lm, w, static_cast<int>(k), exact);
    REQUIRE(list.size() == k);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(list[i].total == doctest::Approx(want[i].total).epsilon(1e-9));
      bool safe = (i + 1 == want.size()) ||
                  std::abs(want[i].total - want[i + 1].total) > 1e-6;
      bool safe_prev =
          (i == 0) || std::abs(want[i].total - want[i - 1].total) > 1e-6;
      if (safe && safe_prev) CHECK(join(list[i].target) == want[i].str);
      CHECK(list[i].total == w.dot(list[i].features));
    }
  }
}

TEST_CASE("scaling all weights preserves the winner") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  std::uniform_int_distribution<std::size_t> widx(0, 2);
  const std::string svoc[3] = {"s0", "s1", "s2"};
  const std::string tvoc[3] = {"t0", "t1", "t2"};
  NGramModel lm = tiny_lm({"t0 t1", "t2 t0"});
  for (int it = 0; it < 15; ++it) {
    PhraseTable table;
    for (int i = 0; i < 3; ++i) {
      add_entry(table, svoc[i], tvoc[widx(rng)], prob(rng), prob(rng),
                prob(rng), prob(rng));
      add_entry(table, svoc[i], tvoc[widx(rng)], prob(rng), prob(rng),
                prob(rng), prob(rng));
    }
    Tokens src = {svoc[widx(rng)], svoc[widx(rng)], svoc[widx(rng)]};
    FeatureWeights w;
    FeatureVector v = w.as_array(), scaled;
    for (std::size_t i = 0; i < kNumFeatures; ++i) scaled[i] = v[i] * 3.7;
    FeatureWeights w2 = FeatureWeights::from_array(scaled);
    Derivation a = decode(src, table, lm, w);
    Derivation b = decode(src, table, lm, w2);
    CHECK(join(a.target) == join(b.target));
    CHECK(b.total == doctest::Approx(a.total * 3.7).epsilon(1e-9));
  }
}

TEST_CASE("weights files round trip and reject unknown names") {
  FeatureWeights w;
  w.lm = 0.25;
  w.word_penalty = -2.5;
  std::string p = "/tmp/lexmt_test_weights.txt";
  save_weights(w, p);
  FeatureWeights r = load_weights(p);
  CHECK(r.as_array() == w.as_array());
  std::string text = read_file(p);
  CHECK(text.find("lm = 0.25\n") != std::string::npos);
  CHECK(text.find("word_penalty = -2.5\n") != std::string::npos);
  write_file(p, "bogus = 1.0\n");
  CHECK_THROWS(load_weights(p));
  write_file(p, "# comment\n\nlm = 0.5\n");
  CHECK(load_weights(p).lm == 0.5);
  CHECK(load_weights(p).phrase_fwd == 1.0);  // untouched default
  std::remove(p.c_str());
}

TEST_CASE("n-best files round trip") {
  PhraseTable table;
  add_entry(table, "a", "x", 0.9);
  add_entry(table, "a", "y", 0.4);
  add_entry(table, "b", "u", 0.7);
  NGramModel lm = tiny_lm({"x u", "y"});
  FeatureWeights w;
  std::vector<std::vector<Derivation>> lists = {
      nbest({"a"}, table, lm, w, 2),
      nbest({"a", "b"}, table, lm, w, 2),
  };
  std::string p = "/tmp/lexmt_test_nbest.txt";
  write_nbest(p, lists);
  auto entries = read_nbest(p);
  REQUIRE(entries.size() == lists[0].size() + lists[1].size());
  std::size_t idx = 0;
  for (std::size_t sid = 0; sid < lists.size(); ++sid)
    for (const Derivation& d : lists[sid]) {
      CHECK(entries[idx].sent_id == static_cast<int>(sid));
      CHECK(entries[idx].target == d.target);
      for (std::size_t i = 0; i < kNumFeatures; ++i)
        CHECK(entries[idx].features[i] ==
              doctest::Approx(d.features[i]).epsilon(1e-6));
      CHECK(entries[idx].total == doctest::Approx(d.total).epsilon(1e-6));
      ++idx;
    }
  std::remove(p.c_str());
}
