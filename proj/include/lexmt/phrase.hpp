#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexmt/align.hpp"
#include "lexmt/corpus.hpp"

namespace lexmt {

using PhraseLinks = std::set<std::pair<std::size_t, std::size_t>>;

// One phrase pair pulled out of a sentence pair, with its internal links
// (indices relative to the phrase spans).
struct ExtractedPhrase {
  Tokens src;
  Tokens tgt;
  PhraseLinks links;

  bool operator==(const ExtractedPhrase& o) const = default;
  auto operator<=>(const ExtractedPhrase& o) const = default;
};

// Every phrase pair consistent with the alignment: at least one link inside
// the box, no link with exactly one endpoint inside, both spans <= max_len.
// Unaligned target boundary words are included by the usual extension; the
// sweep over all source spans covers unaligned source rows.
std::vector<ExtractedPhrase> extract_phrases(const SentencePair& pair,
                                             const AlignmentMatrix& align,
                                             std::size_t max_len = 7);

// N_r histogram: number of distinct events seen exactly r times.
using CountHistogram = std::map<long long, long long>;

// Good-Turing adjusted-count function with cutoff k=5: r* = (r+1)N_{r+1}/N_r
// for r < k when defined, else r.  The estimate is used only when it lands
// in (0, r]; a histogram that misbehaves there (rising N_r) would otherwise
// hand out more mass than it frees.  Empty histogram -> identity.
std::function<double(long long)> good_turing_discount(
    const CountHistogram& hist);

struct PhraseEntry {
  Tokens tgt;
  double phi_tgt_given_src = 0.0;
  double phi_src_given_tgt = 0.0;
  double lex_tgt_given_src = 0.0;
  double lex_src_given_tgt = 0.0;
  long long joint = 0;
  long long src_marginal = 0;
  long long tgt_marginal = 0;
  PhraseLinks links;  // most frequent internal alignment for the pair
};

struct PhraseTable {
  // Keyed by source phrase surface (tokens joined with single spaces).
  std::map<std::string, std::vector<PhraseEntry>> entries;

  const std::vector<PhraseEntry>* lookup(const std::string& src) const {
    auto it = entries.find(src);
    return it == entries.end() ? nullptr : &it->second;
  }
  // Distinct tokens appearing in any source phrase; the out-of-vocabulary
  // test used by the decoder and the evaluator.
  std::set<std::string> source_vocabulary() const;
};

// Groups the extracted multiset, Good-Turing-discounts the joint counts,
// and attaches lexical weights.  table_src_given_tgt holds t(src|tgt)
// (trained on the corpus as-is), table_tgt_given_src holds t(tgt|src)
// (trained on swapped pairs).  Each pair is scored with its most frequent
// internal alignment; ties go to the lexicographically smallest link set.
PhraseTable score_phrases(const std::vector<ExtractedPhrase>& extracted,
                          const TranslationTable& table_src_given_tgt,
                          const TranslationTable& table_tgt_given_src);

// Text format, one entry per line:
//   src ||| tgt ||| phi(t|s) phi(s|t) lex(t|s) lex(s|t) ||| links ||| joint c(s) c(t)
// Scores carry 6 significant digits; links use the i-j alignment syntax.
void save_phrase_table(const PhraseTable& table, const std::string& path);
PhraseTable load_phrase_table(const std::string& path);

}  // namespace lexmt
