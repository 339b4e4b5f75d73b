#ifndef LEXMT_CORPUS_HPP
#define LEXMT_CORPUS_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lexmt/util.hpp"

namespace lexmt {

enum class Origin { corpus, list, augmented_list };
enum class Side { source, target };

struct SentencePair {
  Tokens source;
  Tokens target;
  Origin origin = Origin::corpus;
};

struct Vocabulary {
  Side side = Side::source;
  std::map<std::string, long long> counts;

  long long total() const {
    long long n = 0;
    for (const auto& [tok, c] : counts) n += c;
    return n;
  }
  bool contains(const std::string& tok) const { return counts.count(tok) > 0; }
};

// token<TAB>count, descending count then lexicographic.
void write_vocab_tsv(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace lexmt

#endif
