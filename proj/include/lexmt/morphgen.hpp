#ifndef LEXMT_MORPHGEN_HPP
#define LEXMT_MORPHGEN_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexmt/lexicon.hpp"

namespace lexmt {

enum class Case { nominative, accusative, dative, genitive, instrumental };
enum class Definiteness { definite, indefinite };
enum class NounClass { masculine, feminine, unspecified };

std::string to_string(Case c);
std::string to_string(Definiteness d);
Case case_from_string(const std::string& s);
Definiteness definiteness_from_string(const std::string& s);

// One (case, definiteness) cell: strip/add on the source final word,
// and a target template. The template wraps the full target term via
// {w}; a literal "a/an" is replaced by the chosen article.
struct InflectionRule {
  Case grammatical_case = Case::nominative;
  Definiteness definiteness = Definiteness::definite;
  std::string src_strip;
  std::string src_add;
  std::string tgt_template;
};

struct InflectionParadigm {
  std::string id;
  std::string match_suffix;  // final source word must end with this
  NounClass noun_class = NounClass::unspecified;
  std::vector<InflectionRule> rules;  // at most one rule per cell
};

// Rules file, UTF-8 TSV, one rule per line, '#' comments allowed:
// paradigm_id<TAB>match_suffix<TAB>case<TAB>definiteness<TAB>src_strip<TAB>src_add<TAB>tgt_template
// Rows with one id form a paradigm and must agree on match_suffix.
// noun_class is inferred from the id ("masc"/"fem" substring).
std::vector<InflectionParadigm> load_paradigms(const std::filesystem::path& path);

// Chooses "a" or "an" for an entry. The default policy takes "an"
// when the target term starts with a, e, i, o or u (case-insensitive)
// and honors the entry's art= override.
using ArticlePolicy = std::function<std::string(const LexiconEntry&)>;
std::string default_article(const LexiconEntry& entry);

/// Longest-match paradigm for the final source word. Only entries
/// flagged common-singular-noun (and not already generated) qualify.
const InflectionParadigm* select_paradigm(const LexiconEntry& entry,
                                          const std::vector<InflectionParadigm>& paradigms);

/// One generated entry per rule: final source word re-suffixed, target
/// wrapped by the template. Surface-identical outputs are collapsed;
/// the unmodified seed pair itself is never emitted. Rules whose strip
/// empties the stem are skipped and counted.
struct RuleSkip {
  std::string entry;
  std::string reason;
};

std::vector<LexiconEntry> augment_entry(const LexiconEntry& entry,
                                        const InflectionParadigm& paradigm,
                                        const ArticlePolicy& article = default_article,
                                        std::vector<RuleSkip>* skips = nullptr);

/// Glossary variant: paradigm is selected on the final word by suffix
/// alone (glossary terms carry no noun-class tagging); empty result
/// when nothing matches.
std::vector<LexiconEntry> augment_glossary(const LexiconEntry& entry,
                                           const std::vector<InflectionParadigm>& paradigms,
                                           const ArticlePolicy& article = default_article,
                                           std::vector<RuleSkip>* skips = nullptr);

struct AugmentReport {
  long long seeds_matched = 0;
  long long generated = 0;  // new entries surviving dedup
  std::map<std::string, long long> skips;

  std::string summary() const;
};

/// Union of the input and every generated entry, deduplicated on the
/// (source surface, target surface) pair. Dictionary entries seed only
/// when flagged; glossary entries inflect their ending word; other
/// kinds and already-generated entries pass through untouched.
std::pair<std::vector<LexiconEntry>, AugmentReport> augment_lexicon(
    const std::vector<LexiconEntry>& entries, const std::vector<InflectionParadigm>& paradigms,
    const ArticlePolicy& article = default_article);

}  // namespace lexmt

#endif
