#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lexmt/decoder.hpp"

namespace lexmt {

// BLEU sufficient statistics of one hypothesis against its reference.
struct BleuStats {
  std::array<long long, 4> matches{};
  std::array<long long, 4> totals{};
  long long cand_len = 0;
  long long ref_len = 0;
};

BleuStats hyp_stats(const Tokens& candidate, const Tokens& reference);

// Smoothed corpus BLEU over aggregated statistics (+1 on zero matches;
// the tuning metric).
double bleu_from_stats(const BleuStats& agg);

struct PoolEntry {
  std::string target;  // surface, used for deterministic tie-breaks
  FeatureVector feats{};
  BleuStats stats;
};
// One hypothesis list per development sentence.
using Pool = std::vector<std::vector<PoolEntry>>;

// Corpus BLEU of the per-sentence argmax selection under weights w.
// Score ties pick the smaller target string, then the smaller vector.
double pool_bleu(const Pool& pool, const FeatureVector& w);

// Exact Och line search along one weight dimension: upper envelope of the
// per-sentence score lines, corpus BLEU at interval midpoints.  Returns
// (best weight value for dim, its pool BLEU).
std::pair<double, double> line_search_dim(const Pool& pool,
                                          const FeatureVector& w,
                                          std::size_t dim);

// Coordinate descent over all dimensions until no single-dimension move
// improves pool BLEU.  Returns the weights and their pool BLEU.
std::pair<FeatureVector, double> optimize_on_pool(const Pool& pool,
                                                  const FeatureVector& start);

struct MertParams {
  int nbest_size = 100;
  int max_iterations = 10;
  int random_restarts = 8;
  std::uint64_t seed = 1;
  int jobs = 1;
  DecoderParams decoder;
};

struct MertIteration {
  std::size_t pool_size = 0;
  double bleu_before = 0.0;  // incoming weights on the grown pool
  double bleu_after = 0.0;   // optimized weights on the same pool
};

struct MertResult {
  FeatureWeights weights;  // normalized: lambda_lm == +-1, or unit L1
  std::vector<MertIteration> iterations;
  Pool pool;  // frozen accumulated pool, for post-hoc verification
};

// Minimum Error Rate Training: decode n-best, accumulate the pool, exact
// per-dimension line search from the current point plus seeded random
// restarts in [-1,1]^d; stop when the pool stops growing or the gain
// drops below 1e-4.  Within every iteration bleu_after >= bleu_before.
MertResult mert(const std::vector<SentencePair>& dev,
                const FeatureWeights& initial, const PhraseTable& table,
                const NGramModel& lm, const MertParams& params = {});

void write_mert_trace(const std::string& path,
                      const std::vector<MertIteration>& iterations);

}  // namespace lexmt
