#include "lexmt/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lexmt/util.hpp"

namespace lexmt {

namespace {

constexpr double kFloor = 1e-12;

// Expected counts for one sentence pair under the current table.
// Returned as (e, f, count) triples; e == kNull for the empty word.
struct PairCounts {
  std::vector<std::tuple<std::string, std::string, double>> triples;
  double log_likelihood = 0.0;
};

PairCounts collect_pair(const SentencePair& pair, const TranslationTable& tab) {
  PairCounts out;
  const Tokens& src = pair.source;
  const Tokens& tgt = pair.target;
  for (const std::string& f : src) {
    double denom = tab.prob(f, TranslationTable::kNull);
    for (const std::string& e : tgt) denom += tab.prob(f, e);
    out.log_likelihood +=
        std::log(std::max(denom, kFloor)) -
        std::log(static_cast<double>(tgt.size()) + 1.0);
    denom = std::max(denom, kFloor);
    double p_null = tab.prob(f, TranslationTable::kNull) / denom;
    if (p_null > 0.0)
      out.triples.emplace_back(TranslationTable::kNull, f, p_null);
    for (const std::string& e : tgt) {
      double p = tab.prob(f, e) / denom;
      if (p > 0.0) out.triples.emplace_back(e, f, p);
    }
  }
  return out;
}

}  // namespace

TranslationTable train_model1(const std::vector<SentencePair>& pairs,
                              int iterations, int jobs,
                              std::vector<double>* log_likelihoods) {
  if (pairs.empty()) fail("train_model1: empty corpus");
  if (iterations < 1) fail("train_model1: iterations must be >= 1");

  // Uniform initialization over co-occurring pairs plus NULL.
  TranslationTable tab;
  for (const SentencePair& p : pairs) {
    for (const std::string& f : p.source) {
      tab.t[TranslationTable::kNull][f] = 1.0;
      for (const std::string& e : p.target) tab.t[e][f] = 1.0;
    }
  }
  for (auto& [e, row] : tab.t) {
    double n = static_cast<double>(row.size());
    for (auto& [f, v] : row) v = 1.0 / n;
  }

  std::vector<PairCounts> per_pair(pairs.size());
  for (int it = 0; it < iterations; ++it) {
    parallel_for(pairs.size(), jobs, [&](std::size_t i) {
      per_pair[i] = collect_pair(pairs[i], tab);
    });

    // Reduce in corpus order so the result is bitwise identical for any
    // jobs value.
    std::map<std::string, std::map<std::string, double>> counts;
    double ll = 0.0;
    for (PairCounts& pc : per_pair) {
      ll += pc.log_likelihood;
      for (const auto& [e, f, c] : pc.triples) counts[e][f] += c;
      pc.triples.clear();
    }
    if (log_likelihoods) log_likelihoods->push_back(ll);

    for (auto& [e, row] : counts) {
      double total = 0.0;
      for (const auto& [f, c] : row) total += c;
      if (total < kFloor) continue;  // leave the previous row in place
      auto& trow = tab.t[e];
      for (const auto& [f, c] : row) trow[f] = c / total;
    }
  }
  return tab;
}

AlignmentMatrix viterbi_align(const SentencePair& pair,
                              const TranslationTable& table) {
  AlignmentMatrix out;
  out.src_len = pair.source.size();
  out.tgt_len = pair.target.size();
  for (std::size_t i = 0; i < pair.source.size(); ++i) {
    const std::string& f = pair.source[i];
    // NULL sits at index -1, so it wins ties by the lowest-index rule.
    double best = table.prob(f, TranslationTable::kNull);
    std::ptrdiff_t best_j = -1;
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
      double p = table.prob(f, pair.target[j]);
      if (p > best) {
        best = p;
        best_j = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (best_j >= 0) out.links.insert({i, static_cast<std::size_t>(best_j)});
  }
  return out;
}

AlignmentMatrix transpose(const AlignmentMatrix& a) {
  AlignmentMatrix out;
  out.src_len = a.tgt_len;
  out.tgt_len = a.src_len;
  for (const auto& [i, j] : a.links) out.links.insert({j, i});
  return out;
}

namespace {

void check_dims(const AlignmentMatrix& a, const AlignmentMatrix& b) {
  if (a.src_len != b.src_len || a.tgt_len != b.tgt_len)
    fail("alignment dimension mismatch: " + std::to_string(a.src_len) + "x" +
         std::to_string(a.tgt_len) + " vs " + std::to_string(b.src_len) + "x" +
         std::to_string(b.tgt_len));
}

}  // namespace

AlignmentMatrix intersect(const AlignmentMatrix& a, const AlignmentMatrix& b) {
  check_dims(a, b);
  AlignmentMatrix out;
  out.src_len = a.src_len;
  out.tgt_len = a.tgt_len;
  for (const auto& l : a.links)
    if (b.links.count(l)) out.links.insert(l);
  return out;
}

AlignmentMatrix unite(const AlignmentMatrix& a, const AlignmentMatrix& b) {
  check_dims(a, b);
  AlignmentMatrix out;
  out.src_len = a.src_len;
  out.tgt_len = a.tgt_len;
  out.links = a.links;
  out.links.insert(b.links.begin(), b.links.end());
  return out;
}

AlignmentMatrix grow_diag_final_and(const AlignmentMatrix& fwd,
                                    const AlignmentMatrix& rev) {
  check_dims(fwd, rev);
  AlignmentMatrix cur = intersect(fwd, rev);
  AlignmentMatrix uni = unite(fwd, rev);

  std::vector<bool> row_cov(cur.src_len, false), col_cov(cur.tgt_len, false);
  for (const auto& [i, j] : cur.links) {
    row_cov[i] = true;
    col_cov[j] = true;
  }

  auto adjacent = [&](std::size_t i, std::size_t j) {
    for (std::ptrdiff_t di = -1; di <= 1; ++di)
      for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        std::ptrdiff_t ni = static_cast<std::ptrdiff_t>(i) + di;
        std::ptrdiff_t nj = static_cast<std::ptrdiff_t>(j) + dj;
        if (ni < 0 || nj < 0) continue;
        if (cur.links.count({static_cast<std::size_t>(ni),
                             static_cast<std::size_t>(nj)}))
          return true;
      }
    return false;
  };

  // Grow: rounds against a snapshot of the current set, to fixpoint.  The
  // round result does not depend on scan order, which keeps symmetrization
  // invariant under argument swap plus transposition.
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> added;
    for (const auto& [i, j] : uni.links) {
      if (cur.links.count({i, j})) continue;
      if (row_cov[i] && col_cov[j]) continue;
      if (!adjacent(i, j)) continue;
      added.push_back({i, j});
    }
    if (added.empty()) break;
    for (const auto& [i, j] : added) {
      cur.links.insert({i, j});
      row_cov[i] = true;
      col_cov[j] = true;
    }
  }

  // Final-and: row-major over the union, both endpoints must be uncovered.
  // Conflicting candidates sort the same way row-major on the transpose, so
  // this greedy pass preserves the swap/transpose symmetry too.
  for (const auto& [i, j] : uni.links) {
    if (cur.links.count({i, j})) continue;
    if (row_cov[i] || col_cov[j]) continue;
    cur.links.insert({i, j});
    row_cov[i] = true;
    col_cov[j] = true;
  }
  return cur;
}

std::string format_alignment(const AlignmentMatrix& a) {
  std::string out;
  for (const auto& [i, j] : a.links) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i);
    out += '-';
    out += std::to_string(j);
  }
  return out;
}

AlignmentMatrix parse_alignment(const std::string& line, std::size_t src_len,
                                std::size_t tgt_len) {
  AlignmentMatrix out;
  out.src_len = src_len;
  out.tgt_len = tgt_len;
  for (const std::string& tok : split_ws(line)) {
    auto dash = tok.find('-');
    if (dash == std::string::npos)
      fail("bad alignment link '" + tok + "' (want i-j)");
    std::size_t i = std::strtoull(tok.substr(0, dash).c_str(), nullptr, 10);
    std::size_t j = std::strtoull(tok.substr(dash + 1).c_str(), nullptr, 10);
    if (i >= src_len || j >= tgt_len)
      fail("alignment link " + tok + " out of bounds for " +
           std::to_string(src_len) + "x" + std::to_string(tgt_len));
    out.links.insert({i, j});
  }
  return out;
}

void write_alignments(const std::string& path,
                      const std::vector<AlignmentMatrix>& alignments) {
  std::string out;
  for (const AlignmentMatrix& a : alignments) {
    out += format_alignment(a);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace lexmt
