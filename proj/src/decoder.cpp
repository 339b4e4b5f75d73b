#include "lexmt/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "lexmt/util.hpp"

namespace lexmt {

const std::array<std::string, kNumFeatures>& FeatureWeights::names() {
  static const std::array<std::string, kNumFeatures> kNames = {
      "phrase_fwd", "phrase_rev", "lex_fwd",      "lex_rev",
      "lm",         "distortion", "word_penalty", "phrase_penalty"};
  return kNames;
}

FeatureVector FeatureWeights::as_array() const {
  return {phrase_fwd, phrase_rev, lex_fwd,      lex_rev,
          lm,         distortion, word_penalty, phrase_penalty};
}

FeatureWeights FeatureWeights::from_array(const FeatureVector& v) {
  FeatureWeights w;
  w.phrase_fwd = v[0];
  w.phrase_rev = v[1];
  w.lex_fwd = v[2];
  w.lex_rev = v[3];
  w.lm = v[4];
  w.distortion = v[5];
  w.word_penalty = v[6];
  w.phrase_penalty = v[7];
  return w;
}

double FeatureWeights::dot(const FeatureVector& f) const {
  FeatureVector w = as_array();
  double s = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) s += w[i] * f[i];
  return s;
}

void save_weights(const FeatureWeights& w, const std::string& path) {
  FeatureVector v = w.as_array();
  std::string out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out += FeatureWeights::names()[i];
    out += " = ";
    out += fmt_sig(v[i], 9);
    out += '\n';
  }
  write_file(path, out);
}

FeatureWeights load_weights(const std::string& path) {
  FeatureWeights w;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(path + ":" + std::to_string(lineno) + ": want `name = value`");
    std::string name = line.substr(0, eq);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t'))
      name.pop_back();
    double value = std::strtod(line.c_str() + eq + 1, nullptr);
    const auto& names = FeatureWeights::names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      fail(path + ":" + std::to_string(lineno) + ": unknown feature `" +
           name + "`");
    FeatureVector v = w.as_array();
    v[static_cast<std::size_t>(it - names.begin())] = value;
    w = FeatureWeights::from_array(v);
  }
  return w;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log10_guard(double p) {
  return p < 1e-99 ? -99.0 : std::log10(p);
}

struct PhraseOption {
  std::size_t start = 0, end = 0;  // source span [start, end)
  Tokens tgt;
  std::array<double, 4> scores{};  // log10 phi_fwd phi_rev lex_fwd lex_rev
  bool oov = false;                // flagged passthrough
};

std::vector<PhraseOption> build_options(const Tokens& src,
                                        const PhraseTable& table) {
  std::size_t max_src_len = 1;
  for (const auto& [s, _] : table.entries)
    max_src_len = std::max(max_src_len, split_ws(s).size());

  std::vector<PhraseOption> opts;
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::string surface;
    for (std::size_t j = i; j < src.size() && j - i + 1 <= max_src_len; ++j) {
      if (j > i) surface += ' ';
      surface += src[j];
      const std::vector<PhraseEntry>* row = table.lookup(surface);
      if (!row) continue;
      for (const PhraseEntry& pe : *row) {
        PhraseOption o;
        o.start = i;
        o.end = j + 1;
        o.tgt = pe.tgt;
        o.scores = {log10_guard(pe.phi_tgt_given_src),
                    log10_guard(pe.phi_src_given_tgt),
                    log10_guard(pe.lex_tgt_given_src),
                    log10_guard(pe.lex_src_given_tgt)};
        opts.push_back(std::move(o));
      }
    }
  }
  // Verbatim passthrough for positions no table phrase can cover.  A copy
  // is flagged OOV exactly when its token is absent from the table's
  // source vocabulary; known-but-uncoverable tokens pass through unflagged.
  std::vector<bool> coverable(src.size(), false);
  for (const PhraseOption& o : opts)
    for (std::size_t k = o.start; k < o.end; ++k) coverable[k] = true;
  std::set<std::string> vocab = table.source_vocabulary();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (coverable[i]) continue;
    PhraseOption o;
    o.start = i;
    o.end = i + 1;
    o.tgt = {src[i]};
    o.oov = vocab.count(src[i]) == 0;
    opts.push_back(std::move(o));
  }
  std::sort(opts.begin(), opts.end(),
            [](const PhraseOption& a, const PhraseOption& b) {
              return std::tie(a.start, a.end, a.tgt, a.scores) <
                     std::tie(b.start, b.end, b.tgt, b.scores);
            });
  return opts;
}

// Context-free estimate of one option: weighted table scores, LM with no
// context, and the two penalties.  Distortion is left out.
double option_estimate(const PhraseOption& o, const NGramModel& lm,
                       const FeatureWeights& w) {
  FeatureVector v = w.as_array();
  double est = 0.0;
  for (std::size_t k = 0; k < 4; ++k) est += v[k] * o.scores[k];
  double lm_sum = 0.0;
  for (const std::string& t : o.tgt) lm_sum += lm.cond_logp({}, lm.vocab_map(t));
  est += v[4] * lm_sum;
  est += v[6] * static_cast<double>(o.tgt.size());
  est += v[7];
  return est;
}

// future[i][j]: best estimate for translating span [i, j).
std::vector<std::vector<double>> future_costs(
    std::size_t n, const std::vector<PhraseOption>& opts,
    const NGramModel& lm, const FeatureWeights& w) {
  std::vector<std::vector<double>> fc(n + 1,
                                      std::vector<double>(n + 1, kNegInf));
  for (const PhraseOption& o : opts) {
    double est = option_estimate(o, lm, w);
    fc[o.start][o.end] = std::max(fc[o.start][o.end], est);
  }
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i) {
      std::size_t j = i + len;
      for (std::size_t k = i + 1; k < j; ++k)
        if (fc[i][k] > kNegInf && fc[k][j] > kNegInf)
          fc[i][j] = std::max(fc[i][j], fc[i][k] + fc[k][j]);
    }
  return fc;
}

struct Arc {
  int from = -1;
  int opt = -1;  // -1: the </s> arc into the goal node
  FeatureVector delta{};
  double dtotal = 0.0;
};

struct Node {
  std::vector<bool> cov;
  Tokens ctx;            // last <=2 target surface tokens (starts at <s>)
  std::size_t last = 0;  // one past the last covered source position
  double best = kNegInf;
  std::string best_str;
  double future = 0.0;
  bool live = true;
  std::vector<Arc> arcs;
};

struct Lattice {
  std::vector<Node> nodes;
  int goal = -1;
};

double lm_delta_for(const NGramModel& lm, const Tokens& ctx,
                    const Tokens& tgt) {
  Tokens c;
  for (const std::string& t : ctx) c.push_back(lm.vocab_map(t));
  double sum = 0.0;
  for (const std::string& t : tgt) {
    sum += lm.cond_logp(c, lm.vocab_map(t));
    c.push_back(lm.vocab_map(t));
    if (c.size() > 2) c.erase(c.begin());
  }
  return sum;
}

Lattice search(const Tokens& src, const std::vector<PhraseOption>& opts,
               const NGramModel& lm, const FeatureWeights& weights,
               const DecoderParams& params) {
  const std::size_t n = src.size();
  auto fc = future_costs(n, opts, lm, weights);

  Lattice lat;
  using Key = std::tuple<std::vector<bool>, Tokens, std::size_t>;
  std::vector<std::map<Key, int>> index(n + 1);
  std::vector<std::vector<int>> stacks(n + 1);

  Node start;
  start.cov.assign(n, false);
  start.ctx = {NGramModel::kBos};
  start.last = 0;
  start.best = 0.0;
  start.future = n == 0 ? 0.0 : fc[0][n];
  lat.nodes.push_back(start);
  stacks[0].push_back(0);
  index[0][{lat.nodes[0].cov, lat.nodes[0].ctx, 0}] = 0;

  auto gap_future = [&](const std::vector<bool>& cov) {
    double sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
      if (cov[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && !cov[j]) ++j;
      sum += fc[i][j];
      i = j;
    }
    return sum;
  };

  for (std::size_t c = 0; c <= n; ++c) {
    std::vector<int>& stack = stacks[c];
    // Close the stack: histogram pruning on score + future estimate.
    std::sort(stack.begin(), stack.end(), [&](int a, int b) {
      double sa = lat.nodes[a].best + lat.nodes[a].future;
      double sb = lat.nodes[b].best + lat.nodes[b].future;
      if (sa != sb) return sa > sb;
      return lat.nodes[a].best_str < lat.nodes[b].best_str;
    });
    if (params.stack_size > 0 &&
        stack.size() > static_cast<std::size_t>(params.stack_size)) {
      for (std::size_t k = params.stack_size; k < stack.size(); ++k)
        lat.nodes[stack[k]].live = false;
      stack.resize(params.stack_size);
    }
    if (c == n) break;

    for (int uid : stack) {
      // Snapshot: expansion appends nodes but never moves existing ones.
      const std::vector<bool> ucov = lat.nodes[uid].cov;
      const Tokens uctx = lat.nodes[uid].ctx;
      const std::size_t ulast = lat.nodes[uid].last;
      const double ubest = lat.nodes[uid].best;
      const std::string ustr = lat.nodes[uid].best_str;

      for (std::size_t oi = 0; oi < opts.size(); ++oi) {
        const PhraseOption& o = opts[oi];
        bool overlap = false;
        for (std::size_t k = o.start; k < o.end && !overlap; ++k)
          overlap = ucov[k];
        if (overlap) continue;
        std::ptrdiff_t jump = static_cast<std::ptrdiff_t>(o.start) -
                              static_cast<std::ptrdiff_t>(ulast);
        if (jump < 0) jump = -jump;
        if (params.distortion_limit >= 0 &&
            jump > params.distortion_limit)
          continue;

        FeatureVector delta{};
        for (std::size_t k = 0; k < 4; ++k) delta[k] = o.scores[k];
        delta[4] = lm_delta_for(lm, uctx, o.tgt);
        delta[5] = -static_cast<double>(jump);
        delta[6] = static_cast<double>(o.tgt.size());
        delta[7] = 1.0;
        double dtotal = weights.dot(delta);

        std::vector<bool> ncov = ucov;
        for (std::size_t k = o.start; k < o.end; ++k) ncov[k] = true;
        Tokens nctx = uctx;
        for (const std::string& t : o.tgt) {
          nctx.push_back(t);
          if (nctx.size() > 2) nctx.erase(nctx.begin());
        }
        std::size_t ncount = c + (o.end - o.start);

        Key key{ncov, nctx, o.end};
        auto [it, inserted] =
            index[ncount].try_emplace(key, -1);
        int vid;
        if (inserted) {
          Node v;
          v.cov = ncov;
          v.ctx = nctx;
          v.last = o.end;
          v.future = gap_future(ncov);
          lat.nodes.push_back(std::move(v));
          vid = static_cast<int>(lat.nodes.size()) - 1;
          it->second = vid;
          stacks[ncount].push_back(vid);
        } else {
          vid = it->second;
        }
        Node& v = lat.nodes[vid];
        Arc arc;
        arc.from = uid;
        arc.opt = static_cast<int>(oi);
        arc.delta = delta;
        arc.dtotal = dtotal;
        v.arcs.push_back(arc);
        double cand = ubest + dtotal;
        std::string cand_str =
            ustr.empty() ? join(o.tgt) : ustr + " " + join(o.tgt);
        if (cand > v.best || (cand == v.best && cand_str < v.best_str)) {
          v.best = cand;
          v.best_str = cand_str;
        }
      }
    }
  }

  // Goal node: one </s> arc per surviving complete hypothesis.
  Node goal;
  goal.cov.assign(n, true);
  goal.last = n;
  lat.nodes.push_back(goal);
  lat.goal = static_cast<int>(lat.nodes.size()) - 1;
  for (int uid : stacks[n]) {
    const Node& u = lat.nodes[uid];
    if (!u.live) continue;
    Tokens mapped;
    for (const std::string& t : u.ctx) mapped.push_back(lm.vocab_map(t));
    FeatureVector delta{};
    delta[4] = lm.cond_logp(mapped, NGramModel::kEos);
    Arc arc;
    arc.from = uid;
    arc.opt = -1;
    arc.delta = delta;
    arc.dtotal = weights.dot(delta);
    Node& g = lat.nodes[lat.goal];
    g.arcs.push_back(arc);
    double cand = u.best + arc.dtotal;
    if (cand > g.best || (cand == g.best && u.best_str < g.best_str)) {
      g.best = cand;
      g.best_str = u.best_str;
    }
  }
  return lat;
}

struct Deriv {
  double score = 0.0;
  std::string str;
  Tokens toks;
  FeatureVector feats{};
  std::vector<bool> flags;
};

// Lazy k-best over the lattice (cube-less Huang–Chiang: per-node candidate
// heaps over (arc, j) pairs).  Scores are recomputed as dot(weights, feats)
// so every reported total matches its feature vector bit for bit.
class KBest {
 public:
  KBest(const Lattice& lat, const std::vector<PhraseOption>& opts,
        const FeatureWeights& weights, int start_node)
      : lat_(lat), opts_(opts), weights_(weights), start_(start_node) {
    cache_.resize(lat.nodes.size());
    heaps_.resize(lat.nodes.size());
    seeded_.assign(lat.nodes.size(), false);
  }

  // k-th best derivation of node, or nullptr when exhausted.
  const Deriv* get(int node, std::size_t k) {
    if (node == start_) {
      if (k > 0) return nullptr;
      if (cache_[node].empty()) cache_[node].push_back(Deriv{});
      return &cache_[node][0];
    }
    seed(node);
    auto& cache = cache_[node];
    auto& heap = heaps_[node];
    while (cache.size() <= k && !heap.empty()) {
      auto top = *heap.begin();
      heap.erase(heap.begin());
      cache.push_back(top.deriv);
      const Arc& arc = lat_.nodes[node].arcs[top.arc_idx];
      if (const Deriv* d = get(arc.from, top.j + 1))
        heap.insert(make_cand(node, top.arc_idx, top.j + 1, *d));
    }
    return cache.size() > k ? &cache[k] : nullptr;
  }

 private:
  struct Cand {
    Deriv deriv;
    std::size_t arc_idx = 0;
    std::size_t j = 0;

    bool operator<(const Cand& o) const {
      if (deriv.score != o.deriv.score) return deriv.score > o.deriv.score;
      if (deriv.str != o.deriv.str) return deriv.str < o.deriv.str;
      if (deriv.feats != o.deriv.feats) return deriv.feats < o.deriv.feats;
      if (arc_idx != o.arc_idx) return arc_idx < o.arc_idx;
      return j < o.j;
    }
  };

  Cand make_cand(int node, std::size_t arc_idx, std::size_t j,
                 const Deriv& from) {
    const Arc& arc = lat_.nodes[node].arcs[arc_idx];
    Cand c;
    c.arc_idx = arc_idx;
    c.j = j;
    c.deriv = from;
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      c.deriv.feats[i] += arc.delta[i];
    c.deriv.score = weights_.dot(c.deriv.feats);
    if (arc.opt >= 0) {
      const PhraseOption& o = opts_[arc.opt];
      for (const std::string& t : o.tgt) {
        c.deriv.toks.push_back(t);
        c.deriv.flags.push_back(o.oov);
      }
      c.deriv.str = join(c.deriv.toks);
    }
    return c;
  }

  void seed(int node) {
    if (seeded_[node]) return;
    seeded_[node] = true;
    for (std::size_t a = 0; a < lat_.nodes[node].arcs.size(); ++a) {
      const Arc& arc = lat_.nodes[node].arcs[a];
      if (const Deriv* d = get(arc.from, 0))
        heaps_[node].insert(make_cand(node, a, 0, *d));
    }
  }

  const Lattice& lat_;
  const std::vector<PhraseOption>& opts_;
  const FeatureWeights& weights_;
  int start_;
  std::vector<std::vector<Deriv>> cache_;
  std::vector<std::set<Cand>> heaps_;
  std::vector<bool> seeded_;
};

Derivation to_derivation(const Deriv& d) {
  Derivation out;
  out.target = d.toks;
  out.features = d.feats;
  out.total = d.score;
  out.oov_flags = d.flags;
  return out;
}

// Safety net: monotone left-to-right assembly with the locally best option
// per position.  Reached only when pruning starved every complete path,
// which cannot happen with sane stack sizes on fixture-scale inputs.
Derivation monotone_fallback(const Tokens& src,
                             const std::vector<PhraseOption>& opts,
                             const NGramModel& lm,
                             const FeatureWeights& weights) {
  Derivation out;
  Tokens ctx = {NGramModel::kBos};
  std::size_t pos = 0, prev_end = 0;
  while (pos < src.size()) {
    const PhraseOption* pick = nullptr;
    double pick_est = kNegInf;
    for (const PhraseOption& o : opts) {
      if (o.start != pos) continue;
      double est = option_estimate(o, lm, weights);
      if (!pick || est > pick_est) {
        pick = &o;
        pick_est = est;
      }
    }
    if (!pick) break;  // unreachable: every position has an option
    FeatureVector delta{};
    for (std::size_t k = 0; k < 4; ++k) delta[k] = pick->scores[k];
    delta[4] = lm_delta_for(lm, ctx, pick->tgt);
    delta[5] = -std::abs(static_cast<double>(pick->start) -
                         static_cast<double>(prev_end));
    delta[6] = static_cast<double>(pick->tgt.size());
    delta[7] = 1.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      out.features[i] += delta[i];
    for (const std::string& t : pick->tgt) {
      out.target.push_back(t);
      out.oov_flags.push_back(pick->oov);
      ctx.push_back(t);
      if (ctx.size() > 2) ctx.erase(ctx.begin());
    }
    prev_end = pick->end;
    pos = pick->end;
  }
  Tokens mapped;
  for (const std::string& t : ctx) mapped.push_back(lm.vocab_map(t));
  out.features[4] += lm.cond_logp(mapped, NGramModel::kEos);
  out.total = weights.dot(out.features);
  return out;
}

}  // namespace

std::vector<Derivation> nbest(const Tokens& source, const PhraseTable& table,
                              const NGramModel& lm,
                              const FeatureWeights& weights, int n,
                              const DecoderParams& params) {
  if (n < 1) fail("nbest: n must be >= 1");
  if (source.empty()) return {Derivation{}};

  std::vector<PhraseOption> opts = build_options(source, table);
  Lattice lat = search(source, opts, lm, weights, params);
  if (lat.nodes[lat.goal].arcs.empty())
    return {monotone_fallback(source, opts, lm, weights)};

  KBest kb(lat, opts, weights, 0);
  std::vector<Deriv> kept;
  std::set<std::string> seen;
  // Pop past the n-th distinct string until scores drop strictly below it,
  // so equal-score stragglers still take part in the final ordering.  The
  // pop cap bounds pathological duplicate floods.
  std::size_t cap = static_cast<std::size_t>(n) * 64 + 1024;
  for (std::size_t k = 0; k < cap; ++k) {
    const Deriv* d = kb.get(lat.goal, k);
    if (!d) break;
    if (seen.size() >= static_cast<std::size_t>(n)) {
      double nth = kept[n - 1].score;
      if (d->score < nth) break;
    }
    if (seen.insert(d->str).second) kept.push_back(*d);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Deriv& a, const Deriv& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.str != b.str) return a.str < b.str;
                     return a.feats < b.feats;
                   });
  if (kept.size() > static_cast<std::size_t>(n)) kept.resize(n);
  std::vector<Derivation> out;
  out.reserve(kept.size());
  for (const Deriv& d : kept) out.push_back(to_derivation(d));
  return out;
}

Derivation decode(const Tokens& source, const PhraseTable& table,
                  const NGramModel& lm, const FeatureWeights& weights,
                  const DecoderParams& params) {
  return nbest(source, table, lm, weights, 1, params)[0];
}

void write_nbest(const std::string& path,
                 const std::vector<std::vector<Derivation>>& lists) {
  std::string out;
  for (std::size_t sid = 0; sid < lists.size(); ++sid) {
    for (const Derivation& d : lists[sid]) {
      out += std::to_string(sid);
      out += " ||| ";
      out += join(d.target);
      out += " ||| ";
      for (std::size_t i = 0; i < kNumFeatures; ++i) {
        if (i) out += ' ';
        out += FeatureWeights::names()[i];
        out += "= ";
        out += fmt_fixed(d.features[i], 6);
      }
      out += " ||| ";
      out += fmt_fixed(d.total, 6);
      out += '\n';
    }
  }
  write_file(path, out);
}

std::vector<NBestEntry> read_nbest(const std::string& path) {
  std::vector<NBestEntry> out;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_str(line, " ||| ");
    if (fields.size() != 4)
      fail(path + ":" + std::to_string(lineno) +
           ": want 4 |||-separated fields");
    NBestEntry e;
    e.sent_id = std::atoi(fields[0].c_str());
    e.target = split_ws(fields[1]);
    std::vector<std::string> parts = split_ws(fields[2]);
    if (parts.size() != kNumFeatures * 2)
      fail(path + ":" + std::to_string(lineno) + ": bad feature field");
    const auto& names = FeatureWeights::names();
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      std::string name = parts[2 * i];
      if (name.empty() || name.back() != '=')
        fail(path + ":" + std::to_string(lineno) + ": bad feature name `" +
             name + "`");
      name.pop_back();
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end())
        fail(path + ":" + std::to_string(lineno) + ": unknown feature `" +
             name + "`");
      e.features[static_cast<std::size_t>(it - names.begin())] =
          std::strtod(parts[2 * i + 1].c_str(), nullptr);
    }
    e.total = std::strtod(fields[3].c_str(), nullptr);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace lexmt
