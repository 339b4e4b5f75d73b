#include "lexmt/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "lexmt/util.hpp"

namespace lexmt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::map<std::string, long long> ngram_counts(const Tokens& toks, int n) {
  std::map<std::string, long long> out;
  if (static_cast<int>(toks.size()) < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int k = 1; k < n; ++k) {
      key += ' ';
      key += toks[i + k];
    }
    ++out[key];
  }
  return out;
}

void add_stats(BleuStats& agg, const BleuStats& s) {
  for (int n = 0; n < 4; ++n) {
    agg.matches[n] += s.matches[n];
    agg.totals[n] += s.totals[n];
  }
  agg.cand_len += s.cand_len;
  agg.ref_len += s.ref_len;
}

void sub_stats(BleuStats& agg, const BleuStats& s) {
  for (int n = 0; n < 4; ++n) {
    agg.matches[n] -= s.matches[n];
    agg.totals[n] -= s.totals[n];
  }
  agg.cand_len -= s.cand_len;
  agg.ref_len -= s.ref_len;
}

}  // namespace

BleuStats hyp_stats(const Tokens& candidate, const Tokens& reference) {
  BleuStats s;
  s.cand_len = static_cast<long long>(candidate.size());
  s.ref_len = static_cast<long long>(reference.size());
  for (int n = 1; n <= 4; ++n) {
    auto cand_counts = ngram_counts(candidate, n);
    auto ref_counts = ngram_counts(reference, n);
    for (const auto& [gram, c] : cand_counts) {
      s.totals[n - 1] += c;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end())
        s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& agg) {
  if (agg.cand_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < 4; ++n) {
    double m = static_cast<double>(agg.matches[n]);
    double t = static_cast<double>(agg.totals[n]);
    double p = agg.matches[n] == 0 ? (m + 1.0) / (t + 1.0) : m / t;
    log_sum += std::log(p);
  }
  double ratio = static_cast<double>(agg.ref_len) /
                 static_cast<double>(agg.cand_len);
  double bp = std::min(1.0, std::exp(1.0 - ratio));
  return bp * std::exp(log_sum / 4.0);
}

namespace {

double dot(const FeatureVector& w, const FeatureVector& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) s += w[i] * f[i];
  return s;
}

const PoolEntry* argmax_entry(const std::vector<PoolEntry>& hyps,
                              const FeatureVector& w) {
  const PoolEntry* best = nullptr;
  double best_score = kNegInf;
  for (const PoolEntry& h : hyps) {
    double s = dot(w, h.feats);
    if (!best || s > best_score ||
        (s == best_score && (h.target < best->target ||
                             (h.target == best->target &&
                              h.feats < best->feats)))) {
      best = &h;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

double pool_bleu(const Pool& pool, const FeatureVector& w) {
  BleuStats agg;
  for (const auto& hyps : pool) {
    if (hyps.empty()) continue;
    add_stats(agg, argmax_entry(hyps, w)->stats);
  }
  return bleu_from_stats(agg);
}

namespace {

// Upper envelope of score-vs-gamma lines for one sentence's hypotheses.
// Each hypothesis is the line  score(gamma) = b + m*gamma  with slope
// m = feats[dim] and intercept b = dot(w, feats) - w[dim]*feats[dim].
struct Segment {
  double x_start;  // gamma where this hypothesis takes over
  const PoolEntry* h;
};

std::vector<Segment> envelope(const std::vector<PoolEntry>& hyps,
                              const FeatureVector& w, std::size_t dim) {
  struct Line {
    double m, b;
    const PoolEntry* h;
  };
  std::vector<Line> lines;
  lines.reserve(hyps.size());
  for (const PoolEntry& h : hyps) {
    double m = h.feats[dim];
    double b = dot(w, h.feats) - w[dim] * h.feats[dim];
    lines.push_back({m, b, &h});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.m != b.m) return a.m < b.m;
    if (a.b != b.b) return a.b > b.b;
    return a.h->target < b.h->target;
  });
  // Equal slopes: only the highest intercept can ever be on top.
  std::vector<Line> uniq;
  for (const Line& l : lines)
    if (uniq.empty() || uniq.back().m != l.m) uniq.push_back(l);

  std::vector<Segment> hull;
  std::vector<Line> stack;
  std::vector<double> starts;
  for (const Line& l : uniq) {
    double x = kNegInf;
    while (!stack.empty()) {
      const Line& top = stack.back();
      x = (top.b - l.b) / (l.m - top.m);  // l.m > top.m, no division by 0
      if (x <= starts.back()) {
        stack.pop_back();
        starts.pop_back();
      } else {
        break;
      }
    }
    if (stack.empty()) x = kNegInf;
    stack.push_back(l);
    starts.push_back(x);
  }
  hull.reserve(stack.size());
  for (std::size_t i = 0; i < stack.size(); ++i)
    hull.push_back({starts[i], stack[i].h});
  return hull;
}

}  // namespace

std::pair<double, double> line_search_dim(const Pool& pool,
                                          const FeatureVector& w,
                                          std::size_t dim) {
  // Sweep events: at gamma = x the given sentence switches hypotheses.
  struct Event {
    double x;
    std::size_t sent;
    const PoolEntry* h;
  };
  std::vector<Event> events;
  BleuStats agg;
  std::vector<const PoolEntry*> current(pool.size(), nullptr);
  for (std::size_t s = 0; s < pool.size(); ++s) {
    if (pool[s].empty()) continue;
    std::vector<Segment> hull = envelope(pool[s], w, dim);
    current[s] = hull[0].h;
    add_stats(agg, hull[0].h->stats);
    for (std::size_t i = 1; i < hull.size(); ++i)
      events.push_back({hull[i].x_start, s, hull[i].h});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.sent != b.sent) return a.sent < b.sent;
    return a.h->target < b.h->target;
  });

  double cur_bleu = pool_bleu(pool, w);
  double best_gamma = w[dim];
  double best_bleu = cur_bleu;

  auto consider = [&](double gamma, double bleu) {
    if (bleu > best_bleu) {
      best_bleu = bleu;
      best_gamma = gamma;
    }
  };

  if (events.empty()) return {best_gamma, best_bleu};

  // Interval left of the first breakpoint, then between each pair, then
  // right of the last; corpus BLEU evaluated at interval midpoints.
  consider(events.front().x - 1.0, bleu_from_stats(agg));
  std::size_t i = 0;
  while (i < events.size()) {
    double x = events[i].x;
    while (i < events.size() && events[i].x == x) {
      std::size_t s = events[i].sent;
      sub_stats(agg, current[s]->stats);
      current[s] = events[i].h;
      add_stats(agg, current[s]->stats);
      ++i;
    }
    double mid = i < events.size() ? (x + events[i].x) / 2.0 : x + 1.0;
    consider(mid, bleu_from_stats(agg));
  }
  return {best_gamma, best_bleu};
}

std::pair<FeatureVector, double> optimize_on_pool(const Pool& pool,
                                                  const FeatureVector& start) {
  FeatureVector w = start;
  double cur = pool_bleu(pool, w);
  for (int round = 0; round < 100; ++round) {
    bool improved = false;
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      auto [gamma, bleu] = line_search_dim(pool, w, d);
      if (bleu > cur + 1e-12) {
        w[d] = gamma;
        cur = bleu;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {w, cur};
}

MertResult mert(const std::vector<SentencePair>& dev,
                const FeatureWeights& initial, const PhraseTable& table,
                const NGramModel& lm, const MertParams& params) {
  if (dev.empty()) fail("mert: empty development set");
  bool any_ref = false;
  for (const SentencePair& p : dev) any_ref = any_ref || !p.target.empty();
  if (!any_ref) fail("mert: every development reference is empty");

  MertResult res;
  res.pool.assign(dev.size(), {});
  std::vector<std::set<std::pair<std::string, FeatureVector>>> dedup(
      dev.size());
  FeatureVector w = initial.as_array();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> cube(-1.0, 1.0);

  std::size_t prev_total = 0;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    std::vector<std::vector<Derivation>> lists(dev.size());
    FeatureWeights cur_w = FeatureWeights::from_array(w);
    parallel_for(dev.size(), params.jobs, [&](std::size_t s) {
      lists[s] = nbest(dev[s].source, table, lm, cur_w, params.nbest_size,
                       params.decoder);
    });
    std::size_t total = 0;
    for (std::size_t s = 0; s < dev.size(); ++s) {
      for (const Derivation& d : lists[s]) {
        std::string surf = join(d.target);
        if (!dedup[s].insert({surf, d.features}).second) continue;
        PoolEntry e;
        e.target = std::move(surf);
        e.feats = d.features;
        e.stats = hyp_stats(d.target, dev[s].target);
        res.pool[s].push_back(std::move(e));
      }
      total += res.pool[s].size();
    }
    if (total == prev_total) break;  // pool stopped growing
    prev_total = total;

    double before = pool_bleu(res.pool, w);
    // Optimize from the current point and from seeded restarts; the
    // current point guarantees bleu_after >= bleu_before.
    auto [best_w, best_bleu] = optimize_on_pool(res.pool, w);
    for (int r = 0; r < params.random_restarts; ++r) {
      FeatureVector rw;
      for (std::size_t d = 0; d < kNumFeatures; ++d) rw[d] = cube(rng);
      auto [cand_w, cand_bleu] = optimize_on_pool(res.pool, rw);
      if (cand_bleu > best_bleu) {
        best_bleu = cand_bleu;
        best_w = cand_w;
      }
    }
    res.iterations.push_back({total, before, best_bleu});
    w = best_w;
    if (best_bleu - before < 1e-4) break;
  }

  // Scale so that |lambda_lm| == 1 (sign kept: a negative scale would flip
  // every argmax).  All-zero lm weight falls back to unit L1 norm.
  double lm_mag = std::fabs(w[4]);
  if (lm_mag > 1e-12) {
    for (double& x : w) x /= lm_mag;
  } else {
    double l1 = 0.0;
    for (double x : w) l1 += std::fabs(x);
    if (l1 > 1e-12)
      for (double& x : w) x /= l1;
  }
  res.weights = FeatureWeights::from_array(w);
  return res;
}

void write_mert_trace(const std::string& path,
                      const std::vector<MertIteration>& iterations) {
  std::string out = "iteration\tpool_size\tbleu_before\tbleu_after\n";
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    out += std::to_string(i + 1);
    out += '\t';
    out += std::to_string(iterations[i].pool_size);
    out += '\t';
    out += fmt_fixed(iterations[i].bleu_before, 6);
    out += '\t';
    out += fmt_fixed(iterations[i].bleu_after, 6);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace lexmt
