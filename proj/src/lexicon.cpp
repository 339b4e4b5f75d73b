#include "lexmt/lexicon.hpp"

#include <set>

#include "lexmt/textprep.hpp"

namespace lexmt {

std::string to_string(ListKind kind) {
  switch (kind) {
    case ListKind::dictionary: return "dictionary";
    case ListKind::glossary: return "glossary";
    case ListKind::names: return "names";
    case ListKind::addresses: return "addresses";
    case ListKind::designations: return "designations";
  }
  return "dictionary";
}

ListKind list_kind_from_string(const std::string& s) {
  if (s == "dictionary" || s.empty()) return ListKind::dictionary;
  if (s == "glossary") return ListKind::glossary;
  if (s == "names") return ListKind::names;
  if (s == "addresses") return ListKind::addresses;
  if (s == "designations") return ListKind::designations;
  fail("unknown lexicon kind: '" + s + "'");
}

namespace {

void parse_flags(const std::string& field, std::size_t lineno, const std::filesystem::path& path,
                 LexiconEntry& entry) {
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t pos = field.find(',', start);
    std::string flag = field.substr(start, pos == std::string::npos ? pos : pos - start);
    if (flag == "csn") {
      entry.common_singular_noun = true;
    } else if (flag == "aug") {
      entry.origin = Origin::augmented_list;
    } else if (flag == "art=a" || flag == "art=an") {
      entry.article_override = flag.substr(4);
    } else if (!flag.empty()) {
      fail(path.string() + ":" + std::to_string(lineno) + ": unknown lexicon flag '" + flag + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
}

}  // namespace

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  std::vector<LexiconEntry> entries;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_tab(line);
    if (cols.size() < 2) {
      fail(path.string() + ":" + std::to_string(i + 1) + ": expected at least 2 tab-separated columns");
    }
    LexiconEntry entry;
    entry.source_term = tokenize(cols[0]);
    entry.target_term = tokenize(cols[1]);
    if (entry.source_term.empty() || entry.target_term.empty()) {
      fail(path.string() + ":" + std::to_string(i + 1) + ": empty term");
    }
    entry.kind = list_kind_from_string(cols.size() > 2 ? cols[2] : "");
    if (cols.size() > 3) parse_flags(cols[3], i + 1, path, entry);
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_lexicon(const std::filesystem::path& path, const std::vector<LexiconEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += e.source_surface();
    out += '\t';
    out += e.target_surface();
    out += '\t';
    out += to_string(e.kind);
    out += '\t';
    std::string flags;
    if (e.common_singular_noun) flags += "csn";
    if (e.origin == Origin::augmented_list) {
      if (!flags.empty()) flags += ',';
      flags += "aug";
    }
    if (!e.article_override.empty()) {
      if (!flags.empty()) flags += ',';
      flags += "art=" + e.article_override;
    }
    out += flags;
    out += '\n';
  }
  write_file(path, out);
}

namespace {

bool contains_subsequence(const Tokens& sentence, const Tokens& term) {
  if (term.empty() || term.size() > sentence.size()) return false;
  for (std::size_t i = 0; i + term.size() <= sentence.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < term.size(); ++j) {
      if (sentence[i + j] != term[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

std::pair<std::vector<LexiconEntry>, FilterReport> filter_list(
    const std::vector<LexiconEntry>& entries, const std::vector<SentencePair>& train,
    FilterMode mode) {
  std::vector<LexiconEntry> kept;
  FilterReport report;
  if (mode == FilterMode::off) {
    kept = entries;
    report.kept = static_cast<long long>(entries.size());
    for (const auto& e : entries) report.rows.push_back({e.source_surface(), true, "filter off"});
    return {kept, report};
  }
  Vocabulary vocab = build_vocab(train, Side::source);
  for (const auto& e : entries) {
    bool remove = false;
    std::string reason;
    if (mode == FilterMode::token) {
      remove = true;
      for (const auto& tok : e.source_term) {
        if (!vocab.contains(tok)) {
          remove = false;
          reason = "token '" + tok + "' not in training corpus";
          break;
        }
      }
      if (remove) reason = "all source tokens in training corpus";
    } else {
      for (const auto& p : train) {
        if (contains_subsequence(p.source, e.source_term)) {
          remove = true;
          break;
        }
      }
      reason = remove ? "source term occurs in training corpus" : "source term not in training corpus";
    }
    report.rows.push_back({e.source_surface(), !remove, reason});
    if (remove) {
      ++report.removed;
    } else {
      ++report.kept;
      kept.push_back(e);
    }
  }
  return {kept, report};
}

void write_filter_report(const std::filesystem::path& path, const FilterReport& report) {
  std::string out;
  for (const auto& row : report.rows) {
    out += row.entry;
    out += '\t';
    out += row.kept ? "kept" : "removed";
    out += '\t';
    out += row.reason;
    out += '\n';
  }
  write_file(path, out);
}

std::vector<SentencePair> integrate(const std::vector<SentencePair>& train,
                                    const std::vector<LexiconEntry>& lists) {
  std::vector<SentencePair> out = train;
  out.reserve(train.size() + lists.size());
  for (const auto& e : lists) {
    Origin origin = e.origin == Origin::augmented_list ? Origin::augmented_list : Origin::list;
    out.push_back({e.source_term, e.target_term, origin});
  }
  return out;
}

}  // namespace lexmt
