#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "lexmt/lm.hpp"
#include "lexmt/phrase.hpp"

namespace lexmt {

constexpr std::size_t kNumFeatures = 8;
using FeatureVector = std::array<double, kNumFeatures>;

// Log-linear model weights.  Feature values live in log10 domain where
// probabilistic (phrase/lex/lm); distortion is -Σ|jump|, word_penalty is
// the target length, phrase_penalty the phrase count.
struct FeatureWeights {
  double phrase_fwd = 1.0;   // φ(t|s)
  double phrase_rev = 1.0;   // φ(s|t)
  double lex_fwd = 1.0;      // lex(t|s)
  double lex_rev = 1.0;      // lex(s|t)
  double lm = 1.0;
  double distortion = 1.0;
  double word_penalty = -1.0;  // placeholder until tuned
  double phrase_penalty = 1.0;

  static const std::array<std::string, kNumFeatures>& names();
  FeatureVector as_array() const;
  static FeatureWeights from_array(const FeatureVector& v);
  double dot(const FeatureVector& f) const;
};

void save_weights(const FeatureWeights& w, const std::string& path);
FeatureWeights load_weights(const std::string& path);

struct DecoderParams {
  int stack_size = 100;       // histogram pruning per stack
  int distortion_limit = 6;   // -1 = unlimited
};

// One complete translation with its exact feature breakdown.
struct Derivation {
  Tokens target;
  FeatureVector features{};
  double total = 0.0;
  std::vector<bool> oov_flags;  // per target token: passthrough of an OOV

  long long oov_passthrough_count() const {
    long long n = 0;
    for (bool f : oov_flags) n += f ? 1 : 0;
    return n;
  }
};

// Beam-stack search for the best-scoring translation.  Source tokens with
// no phrase-table cover are copied through verbatim; the copies of tokens
// absent from the table's source vocabulary are flagged OOV.
Derivation decode(const Tokens& source, const PhraseTable& table,
                  const NGramModel& lm, const FeatureWeights& weights,
                  const DecoderParams& params = {});

// Up to n distinct target strings in non-increasing total order (ties by
// target string, then feature vector).  n >= 1.
std::vector<Derivation> nbest(const Tokens& source, const PhraseTable& table,
                              const NGramModel& lm,
                              const FeatureWeights& weights, int n,
                              const DecoderParams& params = {});

// n-best file: `sent_id ||| target ||| name= value ... ||| total`.
struct NBestEntry {
  int sent_id = 0;
  Tokens target;
  FeatureVector features{};
  double total = 0.0;
};
void write_nbest(const std::string& path,
                 const std::vector<std::vector<Derivation>>& lists);
std::vector<NBestEntry> read_nbest(const std::string& path);

}  // namespace lexmt
