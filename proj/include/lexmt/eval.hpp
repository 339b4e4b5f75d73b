#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "lexmt/phrase.hpp"

namespace lexmt {

struct BleuResult {
  double score = 0.0;  // [0,1]
  std::array<double, 4> precisions{};
  double brevity_penalty = 0.0;
  long long candidate_length = 0;
  long long reference_length = 0;
  std::array<long long, 4> matches{};
  std::array<long long, 4> totals{};
};

// Corpus BLEU, single reference, clipped n-gram precisions up to max_n=4,
// BP = min(1, e^(1-r/c)).  Unsmoothed by default: any zero match count
// zeroes the score.  smooth_plus_one turns a zero match count m/t into
// (m+1)/(t+1) — the tuning variant only.
BleuResult bleu(const std::vector<Tokens>& candidates,
                const std::vector<Tokens>& references, int max_n = 4,
                bool smooth_plus_one = false);

enum class OovMode { tokens, types };

// Source tokens absent from the vocabulary (occurrences or distinct types).
long long oov_count(const std::vector<Tokens>& test_source,
                    const std::set<std::string>& vocab,
                    OovMode mode = OovMode::tokens);
long long oov_count(const std::vector<Tokens>& test_source,
                    const PhraseTable& table, OovMode mode = OovMode::tokens);

}  // namespace lexmt
