#ifndef LEXMT_LEXICON_HPP
#define LEXMT_LEXICON_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "lexmt/corpus.hpp"

namespace lexmt {

enum class ListKind { dictionary, glossary, names, addresses, designations };

std::string to_string(ListKind kind);
ListKind list_kind_from_string(const std::string& s);

struct LexiconEntry {
  Tokens source_term;
  Tokens target_term;
  ListKind kind = ListKind::dictionary;
  // common-singular-noun flag; inflection seeds must carry it
  bool common_singular_noun = false;
  // per-entry override for the indefinite article ("a" or "an"); empty = heuristic
  std::string article_override;
  Origin origin = Origin::list;

  std::string source_surface() const { return join(source_term); }
  std::string target_surface() const { return join(target_term); }
};

// TSV: source_term<TAB>target_term<TAB>kind<TAB>flags
// flags is a comma list: csn, art=a, art=an, aug. Terms are run through
// the corpus tokenizer on load. kind and flags columns may be omitted
// (dictionary, no flags).
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
void save_lexicon(const std::filesystem::path& path, const std::vector<LexiconEntry>& entries);

enum class FilterMode { token, phrase, off };

struct FilterRow {
  std::string entry;
  bool kept = true;
  std::string reason;
};

struct FilterReport {
  long long kept = 0;
  long long removed = 0;
  std::vector<FilterRow> rows;
};

void write_filter_report(const std::filesystem::path& path, const FilterReport& report);

/// Removes entries already covered by the training corpus source side.
/// token mode: removed when every source token of the entry is in the
/// training vocabulary. phrase mode: removed when the whole source
/// term occurs contiguously in some training source sentence.
std::pair<std::vector<LexiconEntry>, FilterReport> filter_list(
    const std::vector<LexiconEntry>& entries, const std::vector<SentencePair>& train,
    FilterMode mode = FilterMode::token);

/// Appends each entry once as a sentence pair; corpus pairs keep their
/// positions and precede the list block.
std::vector<SentencePair> integrate(const std::vector<SentencePair>& train,
                                    const std::vector<LexiconEntry>& lists);

}  // namespace lexmt

#endif
