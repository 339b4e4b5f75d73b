#include "lexmt/morphgen.hpp"

#include <algorithm>
#include <set>

namespace lexmt {

std::string to_string(Case c) {
  switch (c) {
    case Case::nominative: return "nominative";
    case Case::accusative: return "accusative";
    case Case::dative: return "dative";
    case Case::genitive: return "genitive";
    case Case::instrumental: return "instrumental";
  }
  return "nominative";
}

std::string to_string(Definiteness d) {
  return d == Definiteness::definite ? "definite" : "indefinite";
}

Case case_from_string(const std::string& s) {
  if (s == "nominative") return Case::nominative;
  if (s == "accusative") return Case::accusative;
  if (s == "dative") return Case::dative;
  if (s == "genitive") return Case::genitive;
  if (s == "instrumental") return Case::instrumental;
  fail("unknown case: '" + s + "'");
}

Definiteness definiteness_from_string(const std::string& s) {
  if (s == "definite") return Definiteness::definite;
  if (s == "indefinite") return Definiteness::indefinite;
  fail("unknown definiteness: '" + s + "'");
}

namespace {

int cell_index(const InflectionRule& r) {
  return static_cast<int>(r.grammatical_case) * 2 + static_cast<int>(r.definiteness);
}

std::size_t count_placeholder(const std::string& s, const std::string& what) {
  std::size_t n = 0, pos = 0;
  while ((pos = s.find(what, pos)) != std::string::npos) {
    ++n;
    pos += what.size();
  }
  return n;
}

}  // namespace

std::vector<InflectionParadigm> load_paradigms(const std::filesystem::path& path) {
  std::vector<InflectionParadigm> paradigms;
  std::map<std::string, std::size_t> index;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_tab(line);
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (cols.size() != 7) fail(where + ": expected 7 tab-separated columns, got " + std::to_string(cols.size()));
    InflectionRule rule;
    rule.grammatical_case = case_from_string(cols[2]);
    rule.definiteness = definiteness_from_string(cols[3]);
    rule.src_strip = cols[4];
    rule.src_add = cols[5];
    rule.tgt_template = cols[6];
    if (cols[1].empty()) fail(where + ": empty match_suffix");
    if (count_placeholder(rule.tgt_template, "{w}") != 1) {
      fail(where + ": target template must contain exactly one {w}");
    }
    auto it = index.find(cols[0]);
    if (it == index.end()) {
      InflectionParadigm p;
      p.id = cols[0];
      p.match_suffix = cols[1];
      if (p.id.find("masc") != std::string::npos) p.noun_class = NounClass::masculine;
      else if (p.id.find("fem") != std::string::npos) p.noun_class = NounClass::feminine;
      index.emplace(p.id, paradigms.size());
      paradigms.push_back(std::move(p));
      it = index.find(cols[0]);
    }
    InflectionParadigm& p = paradigms[it->second];
    if (p.match_suffix != cols[1]) {
      fail(where + ": paradigm '" + cols[0] + "' has conflicting match_suffix");
    }
    for (const auto& existing : p.rules) {
      if (cell_index(existing) == cell_index(rule)) {
        fail(where + ": duplicate rule for " + cols[2] + "/" + cols[3] + " in paradigm '" + cols[0] + "'");
      }
    }
    p.rules.push_back(std::move(rule));
  }
  return paradigms;
}

std::string default_article(const LexiconEntry& entry) {
  if (!entry.article_override.empty()) return entry.article_override;
  if (entry.target_term.empty()) return "a";
  char c = entry.target_term.front().empty() ? '\0' : entry.target_term.front()[0];
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
  }
}

namespace {

const InflectionParadigm* match_by_suffix(const std::string& word,
                                          const std::vector<InflectionParadigm>& paradigms) {
  const InflectionParadigm* best = nullptr;
  for (const auto& p : paradigms) {
    if (word.size() >= p.match_suffix.size() && word.ends_with(p.match_suffix)) {
      if (!best || p.match_suffix.size() > best->match_suffix.size()) best = &p;
    }
  }
  return best;
}

std::string replace_all(std::string s, const std::string& what, const std::string& with) {
  std::size_t pos = 0;
  while ((pos = s.find(what, pos)) != std::string::npos) {
    s.replace(pos, what.size(), with);
    pos += with.size();
  }
  return s;
}

// Template text is split on whitespace only: tokens such as "man's"
// stay whole here and meet the corpus tokenizer when the list is
// loaded back for integration.
Tokens apply_template(const std::string& tmpl, const std::string& article,
                      const std::string& target_surface) {
  std::string s = replace_all(tmpl, "a/an", article);
  s = replace_all(s, "{w}", target_surface);
  return split_ws(s);
}

}  // namespace

const InflectionParadigm* select_paradigm(const LexiconEntry& entry,
                                          const std::vector<InflectionParadigm>& paradigms) {
  if (!entry.common_singular_noun) return nullptr;
  if (entry.origin == Origin::augmented_list) return nullptr;
  if (entry.source_term.empty()) return nullptr;
  return match_by_suffix(entry.source_term.back(), paradigms);
}

std::vector<LexiconEntry> augment_entry(const LexiconEntry& entry,
                                        const InflectionParadigm& paradigm,
                                        const ArticlePolicy& article,
                                        std::vector<RuleSkip>* skips) {
  std::vector<LexiconEntry> out;
  std::set<std::pair<std::string, std::string>> seen;
  seen.insert({entry.source_surface(), entry.target_surface()});
  const std::string& final_word = entry.source_term.back();
  const std::string art = article(entry);
  for (const auto& rule : paradigm.rules) {
    if (!final_word.ends_with(rule.src_strip)) {
      if (skips) skips->push_back({entry.source_surface(), "strip suffix does not match rule " +
                                                               to_string(rule.grammatical_case) + "/" +
                                                               to_string(rule.definiteness)});
      continue;
    }
    std::string stem = final_word.substr(0, final_word.size() - rule.src_strip.size());
    if (stem.empty()) {
      if (skips) skips->push_back({entry.source_surface(), "strip empties the stem"});
      continue;
    }
    LexiconEntry gen;
    gen.source_term = entry.source_term;
    gen.source_term.back() = stem + rule.src_add;
    gen.target_term = apply_template(rule.tgt_template, art, entry.target_surface());
    gen.kind = entry.kind;
    gen.origin = Origin::augmented_list;
    auto key = std::make_pair(gen.source_surface(), gen.target_surface());
    if (!seen.insert(key).second) continue;
    out.push_back(std::move(gen));
  }
  return out;
}

std::vector<LexiconEntry> augment_glossary(const LexiconEntry& entry,
                                           const std::vector<InflectionParadigm>& paradigms,
                                           const ArticlePolicy& article,
                                           std::vector<RuleSkip>* skips) {
  if (entry.source_term.empty()) return {};
  const InflectionParadigm* p = match_by_suffix(entry.source_term.back(), paradigms);
  if (!p) {
    if (skips) skips->push_back({entry.source_surface(), "final word matches no paradigm"});
    return {};
  }
  return augment_entry(entry, *p, article, skips);
}

std::string AugmentReport::summary() const {
  std::string s = "seeds matched: " + std::to_string(seeds_matched) +
                  ", generated: " + std::to_string(generated);
  for (const auto& [reason, n] : skips) s += "\n  skipped (" + reason + "): " + std::to_string(n);
  return s;
}

std::pair<std::vector<LexiconEntry>, AugmentReport> augment_lexicon(
    const std::vector<LexiconEntry>& entries, const std::vector<InflectionParadigm>& paradigms,
    const ArticlePolicy& article) {
  std::vector<LexiconEntry> out;
  AugmentReport report;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : entries) {
    if (seen.insert({e.source_surface(), e.target_surface()}).second) {
      out.push_back(e);
    } else {
      ++report.skips["duplicate input entry"];
    }
  }
  for (const auto& e : entries) {
    if (e.origin == Origin::augmented_list) {
      ++report.skips["already generated"];
      continue;
    }
    std::vector<RuleSkip> rule_skips;
    std::vector<LexiconEntry> generated;
    if (e.kind == ListKind::glossary) {
      const InflectionParadigm* p =
          e.source_term.empty() ? nullptr : match_by_suffix(e.source_term.back(), paradigms);
      if (!p) {
        ++report.skips["no matching paradigm"];
        continue;
      }
      ++report.seeds_matched;
      generated = augment_entry(e, *p, article, &rule_skips);
    } else if (e.kind == ListKind::dictionary) {
      const InflectionParadigm* p = select_paradigm(e, paradigms);
      if (!p) {
        ++report.skips[e.common_singular_noun ? "no matching paradigm"
                                              : "not flagged common-singular-noun"];
        continue;
      }
      ++report.seeds_matched;
      generated = augment_entry(e, *p, article, &rule_skips);
    } else {
      ++report.skips["kind not augmented"];
      continue;
    }
    for (const auto& skip : rule_skips) {
      if (skip.reason == "strip empties the stem") ++report.skips["strip empties the stem"];
    }
    for (auto& g : generated) {
      auto key = std::make_pair(g.source_surface(), g.target_surface());
      if (!seen.insert(key).second) {
        ++report.skips["duplicate generated entry"];
        continue;
      }
      ++report.generated;
      out.push_back(std::move(g));
    }
  }
  return {out, report};
}

}  // namespace lexmt
