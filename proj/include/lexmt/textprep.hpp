#ifndef LEXMT_TEXTPREP_HPP
#define LEXMT_TEXTPREP_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexmt/corpus.hpp"

namespace lexmt {

/// Splits one line into tokens: whitespace separates, punctuation and
/// symbol codepoints become single-character tokens. Zero-width
/// joiners and combining signs stay inside their word, so Sinhala and
/// Tamil conjuncts survive. Idempotent on already tokenized text.
/// The language tag is accepted for interface symmetry; segmentation
/// itself is script-neutral.
Tokens tokenize(std::string_view line, std::string_view lang = {});

// Per-token casing statistics: lowercased form -> surface form -> count.
struct TruecaseModel {
  std::map<std::string, std::map<std::string, long long>> counts;

  void add_sentence(const Tokens& tokens);
  // Most frequent surface for the lowercased key; ties break to the
  // lexicographically smallest surface. Empty string when unseen.
  std::string best_surface(const std::string& lowered) const;
};

TruecaseModel train_truecase(const std::vector<Tokens>& corpus);

/// Replaces the sentence-initial token by its most frequent training
/// casing; unseen initial tokens are lowercased; everything else
/// passes through. Intended for the English side only.
Tokens truecase(const Tokens& tokens, const TruecaseModel& model);

/// Drops pairs with an empty side, a side longer than max_len, or a
/// longer/shorter length ratio strictly above max_ratio. Order kept.
std::vector<SentencePair> clean(const std::vector<SentencePair>& pairs, std::size_t max_len = 80,
                                double max_ratio = 9.0);

Vocabulary build_vocab(const std::vector<SentencePair>& pairs, Side side);

/// Reads an aligned pair of one-sentence-per-line files and tokenizes
/// both sides. Line counts must match.
std::vector<SentencePair> read_parallel(const std::filesystem::path& src_path,
                                        const std::filesystem::path& tgt_path);

void write_parallel(const std::filesystem::path& src_path, const std::filesystem::path& tgt_path,
                    const std::vector<SentencePair>& pairs);

}  // namespace lexmt

#endif
