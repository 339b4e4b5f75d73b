#include "lexmt/phrase.hpp"

#include <algorithm>
#include <cstdlib>

#include "lexmt/util.hpp"

namespace lexmt {

std::vector<ExtractedPhrase> extract_phrases(const SentencePair& pair,
                                             const AlignmentMatrix& align,
                                             std::size_t max_len) {
  if (max_len < 1) fail("extract_phrases: max_len must be >= 1");
  const std::size_t n = pair.source.size();
  const std::size_t m = pair.target.size();
  std::vector<bool> col_aligned(m, false);
  for (const auto& [i, j] : align.links) col_aligned[j] = true;

  std::vector<ExtractedPhrase> out;
  auto emit = [&](std::size_t i1, std::size_t i2, std::size_t j1,
                  std::size_t j2) {
    ExtractedPhrase ep;
    ep.src.assign(pair.source.begin() + i1, pair.source.begin() + i2 + 1);
    ep.tgt.assign(pair.target.begin() + j1, pair.target.begin() + j2 + 1);
    for (const auto& [i, j] : align.links)
      if (i >= i1 && i <= i2 && j >= j1 && j <= j2)
        ep.links.insert({i - i1, j - j1});
    out.push_back(std::move(ep));
  };

  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1; i2 < n && i2 - i1 + 1 <= max_len; ++i2) {
      // Tight target span over links inside the source span.
      std::size_t j1 = m, j2 = 0;
      bool any = false;
      for (const auto& [i, j] : align.links) {
        if (i < i1 || i > i2) continue;
        any = true;
        j1 = std::min(j1, j);
        j2 = std::max(j2, j);
      }
      if (!any) continue;
      bool consistent = true;
      for (const auto& [i, j] : align.links) {
        if (j >= j1 && j <= j2 && (i < i1 || i > i2)) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;
      // Extend over unaligned target boundary columns.
      std::size_t js = j1;
      for (;;) {
        std::size_t je = j2;
        for (;;) {
          if (je - js + 1 <= max_len) emit(i1, i2, js, je);
          if (je + 1 >= m || col_aligned[je + 1]) break;
          ++je;
        }
        if (js == 0 || col_aligned[js - 1]) break;
        --js;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::function<double(long long)> good_turing_discount(
    const CountHistogram& hist) {
  constexpr long long kCutoff = 5;
  if (hist.empty())
    return [](long long r) { return static_cast<double>(r); };
  // Copy what the closure needs; the histogram itself may go away.
  std::map<long long, double> adjusted;
  for (const auto& [r, n_r] : hist) {
    double r_star = static_cast<double>(r);
    if (r >= 1 && r < kCutoff && n_r > 0) {
      auto next = hist.find(r + 1);
      if (next != hist.end() && next->second > 0) {
        double est = static_cast<double>(r + 1) *
                     static_cast<double>(next->second) /
                     static_cast<double>(n_r);
        if (est > 0.0 && est <= static_cast<double>(r)) r_star = est;
      }
    }
    adjusted[r] = r_star;
  }
  return [adjusted](long long r) {
    auto it = adjusted.find(r);
    return it == adjusted.end() ? static_cast<double>(r) : it->second;
  };
}

namespace {

constexpr double kProbFloor = 1e-12;

// lex weight of `out` tokens given `in` tokens under t(out|in): every out
// word averages t over its linked in words (NULL when unlinked), then the
// word scores multiply.
double lexical_weight(const Tokens& out_toks, const Tokens& in_toks,
                      const PhraseLinks& links, bool out_is_second,
                      const TranslationTable& t_out_given_in) {
  double prod = 1.0;
  for (std::size_t o = 0; o < out_toks.size(); ++o) {
    double sum = 0.0;
    int linked = 0;
    for (const auto& [a, b] : links) {
      std::size_t in_idx = out_is_second ? a : b;
      std::size_t out_idx = out_is_second ? b : a;
      if (out_idx != o) continue;
      sum += t_out_given_in.prob(out_toks[o], in_toks[in_idx]);
      ++linked;
    }
    double word;
    if (linked == 0)
      word = t_out_given_in.prob(out_toks[o], TranslationTable::kNull);
    else
      word = sum / linked;
    prod *= std::max(word, kProbFloor);
  }
  return prod;
}

}  // namespace

std::set<std::string> PhraseTable::source_vocabulary() const {
  std::set<std::string> vocab;
  for (const auto& [src, _] : entries)
    for (const std::string& tok : split_ws(src)) vocab.insert(tok);
  return vocab;
}

PhraseTable score_phrases(const std::vector<ExtractedPhrase>& extracted,
                          const TranslationTable& table_src_given_tgt,
                          const TranslationTable& table_tgt_given_src) {
  struct Agg {
    long long joint = 0;
    std::map<PhraseLinks, long long> link_counts;
    Tokens src_toks, tgt_toks;
  };
  std::map<std::string, std::map<std::string, Agg>> grouped;
  for (const ExtractedPhrase& ep : extracted) {
    Agg& a = grouped[join(ep.src)][join(ep.tgt)];
    if (a.joint == 0) {
      a.src_toks = ep.src;
      a.tgt_toks = ep.tgt;
    }
    ++a.joint;
    ++a.link_counts[ep.links];
  }

  std::map<std::string, long long> src_marginal, tgt_marginal;
  CountHistogram hist;
  for (const auto& [s, row] : grouped)
    for (const auto& [t, agg] : row) {
      src_marginal[s] += agg.joint;
      tgt_marginal[t] += agg.joint;
      ++hist[agg.joint];
    }
  auto discount = good_turing_discount(hist);

  PhraseTable table;
  for (const auto& [s, row] : grouped) {
    std::vector<PhraseEntry>& dst = table.entries[s];
    for (const auto& [t, agg] : row) {
      PhraseEntry pe;
      pe.tgt = agg.tgt_toks;
      pe.joint = agg.joint;
      pe.src_marginal = src_marginal[s];
      pe.tgt_marginal = tgt_marginal[t];
      double adj = discount(agg.joint);
      pe.phi_tgt_given_src = adj / static_cast<double>(pe.src_marginal);
      pe.phi_src_given_tgt = adj / static_cast<double>(pe.tgt_marginal);
      // Most frequent internal alignment; map order breaks ties toward the
      // lexicographically smallest link set.
      long long best = -1;
      for (const auto& [links, c] : agg.link_counts)
        if (c > best) {
          best = c;
          pe.links = links;
        }
      pe.lex_tgt_given_src = lexical_weight(
          agg.tgt_toks, agg.src_toks, pe.links, true, table_tgt_given_src);
      pe.lex_src_given_tgt = lexical_weight(
          agg.src_toks, agg.tgt_toks, pe.links, false, table_src_given_tgt);
      dst.push_back(std::move(pe));
    }
  }
  return table;
}

void save_phrase_table(const PhraseTable& table, const std::string& path) {
  std::string out;
  for (const auto& [src, row] : table.entries) {
    for (const PhraseEntry& pe : row) {
      AlignmentMatrix am;
      am.links = pe.links;
      out += src;
      out += " ||| ";
      out += join(pe.tgt);
      out += " ||| ";
      out += fmt_sig(pe.phi_tgt_given_src, 6);
      out += ' ';
      out += fmt_sig(pe.phi_src_given_tgt, 6);
      out += ' ';
      out += fmt_sig(pe.lex_tgt_given_src, 6);
      out += ' ';
      out += fmt_sig(pe.lex_src_given_tgt, 6);
      out += " ||| ";
      out += format_alignment(am);
      out += " ||| ";
      out += std::to_string(pe.joint);
      out += ' ';
      out += std::to_string(pe.src_marginal);
      out += ' ';
      out += std::to_string(pe.tgt_marginal);
      out += '\n';
    }
  }
  write_file(path, out);
}

PhraseTable load_phrase_table(const std::string& path) {
  PhraseTable table;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_str(line, " ||| ");
    if (fields.size() != 5)
      fail(path + ":" + std::to_string(lineno) +
           ": want 5 |||-separated fields, got " +
           std::to_string(fields.size()));
    PhraseEntry pe;
    pe.tgt = split_ws(fields[1]);
    std::vector<std::string> scores = split_ws(fields[2]);
    if (scores.size() != 4)
      fail(path + ":" + std::to_string(lineno) + ": want 4 scores");
    pe.phi_tgt_given_src = std::strtod(scores[0].c_str(), nullptr);
    pe.phi_src_given_tgt = std::strtod(scores[1].c_str(), nullptr);
    pe.lex_tgt_given_src = std::strtod(scores[2].c_str(), nullptr);
    pe.lex_src_given_tgt = std::strtod(scores[3].c_str(), nullptr);
    Tokens src_toks = split_ws(fields[0]);
    AlignmentMatrix am =
        parse_alignment(fields[3], src_toks.size(), pe.tgt.size());
    pe.links = am.links;
    std::vector<std::string> counts = split_ws(fields[4]);
    if (counts.size() != 3)
      fail(path + ":" + std::to_string(lineno) + ": want 3 counts");
    pe.joint = std::strtoll(counts[0].c_str(), nullptr, 10);
    pe.src_marginal = std::strtoll(counts[1].c_str(), nullptr, 10);
    pe.tgt_marginal = std::strtoll(counts[2].c_str(), nullptr, 10);
    table.entries[fields[0]].push_back(std::move(pe));
  }
  return table;
}

}  // namespace lexmt
