#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexmt/util.hpp"

namespace lexmt {

// Backoff n-gram model over log10 probabilities (ARPA conventions).
struct NGramModel {
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";
  // log10 floor standing in for zero probability.
  static constexpr double kLogFloor = -99.0;

  struct Entry {
    double logp = 0.0;
    double bow = 0.0;  // log10 backoff weight; meaningful for order < n
  };

  int order = 3;
  // grams[n-1]: n-gram (tokens joined with single spaces) -> entry.
  std::vector<std::map<std::string, Entry>> grams;

  bool has(const std::string& key, int n) const {
    return n >= 1 && n <= static_cast<int>(grams.size()) &&
           grams[n - 1].count(key) > 0;
  }

  // p(word | context) with the Katz backoff chain; context length is
  // clipped to order-1.  Tokens must already be mapped to <unk> as needed.
  double cond_logp(const Tokens& context, const std::string& word) const;

  // Maps a token to itself if known at the unigram level, else <unk>.
  const std::string& vocab_map(const std::string& tok) const;

  // Sum of conditional log10 probabilities over the sequence wrapped in
  // <s> ... </s>, OOV tokens scored as <unk>.
  double score_sequence(const Tokens& tokens) const;
};

// Raw n-gram counts over the corpus padded with one <s> and one </s> per
// sentence; counts[n-1] maps n-grams to occurrence counts.
std::vector<std::map<Tokens, long long>> count_ngrams(
    const std::vector<Tokens>& corpus, int order);

// Katz backoff estimation with Good-Turing discounting of counts below 5.
// The unigram mass freed by discounting becomes <unk>; <s> is a context,
// not an event, and carries the floor probability.  When a context's
// observed continuations already exhaust the lower-order mass, discounting
// is undone there (estimates renormalized) so every conditional
// distribution still sums to one.
NGramModel train_lm(const std::vector<Tokens>& corpus, int order = 3);

double score_sequence(const NGramModel& model, const Tokens& tokens);

// ARPA text I/O, 6-decimal log values; load followed by save reproduces
// the file byte for byte.
void save_arpa(const NGramModel& model, const std::string& path);
NGramModel load_arpa(const std::string& path);

}  // namespace lexmt
