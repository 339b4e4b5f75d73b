#include "lexmt/textprep.hpp"

#include <algorithm>

namespace lexmt {

Tokens tokenize(std::string_view line, std::string_view /*lang*/) {
  std::u32string cps = utf8_decode(line);
  Tokens out;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(utf8_encode(cur));
      cur.clear();
    }
  };
  for (char32_t cp : cps) {
    if (is_space_cp(cp)) {
      flush();
    } else if (is_punct_or_symbol_cp(cp)) {
      flush();
      std::u32string one(1, cp);
      out.push_back(utf8_encode(one));
    } else {
      cur.push_back(cp);
    }
  }
  flush();
  return out;
}

void TruecaseModel::add_sentence(const Tokens& tokens) {
  for (const auto& tok : tokens) ++counts[ascii_lower(tok)][tok];
}

std::string TruecaseModel::best_surface(const std::string& lowered) const {
  auto it = counts.find(lowered);
  if (it == counts.end()) return {};
  long long best = -1;
  std::string surface;
  // map iteration is lexicographic, so the first maximum is the
  // lexicographically smallest surface among ties
  for (const auto& [form, n] : it->second) {
    if (n > best) {
      best = n;
      surface = form;
    }
  }
  return surface;
}

TruecaseModel train_truecase(const std::vector<Tokens>& corpus) {
  TruecaseModel model;
  for (const auto& sent : corpus) model.add_sentence(sent);
  return model;
}

Tokens truecase(const Tokens& tokens, const TruecaseModel& model) {
  if (tokens.empty()) return tokens;
  Tokens out = tokens;
  std::string lowered = ascii_lower(out[0]);
  std::string best = model.best_surface(lowered);
  out[0] = best.empty() ? lowered : best;
  return out;
}

std::vector<SentencePair> clean(const std::vector<SentencePair>& pairs, std::size_t max_len,
                                double max_ratio) {
  std::vector<SentencePair> kept;
  kept.reserve(pairs.size());
  for (const auto& p : pairs) {
    std::size_t a = p.source.size(), b = p.target.size();
    if (a == 0 || b == 0) continue;
    if (a > max_len || b > max_len) continue;
    double ratio = static_cast<double>(std::max(a, b)) / static_cast<double>(std::min(a, b));
    if (ratio > max_ratio) continue;
    kept.push_back(p);
  }
  return kept;
}

Vocabulary build_vocab(const std::vector<SentencePair>& pairs, Side side) {
  Vocabulary vocab;
  vocab.side = side;
  for (const auto& p : pairs) {
    const Tokens& toks = side == Side::source ? p.source : p.target;
    for (const auto& tok : toks) ++vocab.counts[tok];
  }
  return vocab;
}

std::vector<SentencePair> read_parallel(const std::filesystem::path& src_path,
                                        const std::filesystem::path& tgt_path) {
  std::vector<std::string> src_lines = read_lines(src_path);
  std::vector<std::string> tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size()) {
    fail("parallel corpus line count mismatch: " + src_path.string() + " has " +
         std::to_string(src_lines.size()) + " lines, " + tgt_path.string() + " has " +
         std::to_string(tgt_lines.size()));
  }
  std::vector<SentencePair> pairs;
  pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    pairs.push_back({tokenize(src_lines[i]), tokenize(tgt_lines[i]), Origin::corpus});
  }
  return pairs;
}

void write_parallel(const std::filesystem::path& src_path, const std::filesystem::path& tgt_path,
                    const std::vector<SentencePair>& pairs) {
  std::string src, tgt;
  for (const auto& p : pairs) {
    src += join(p.source);
    src += '\n';
    tgt += join(p.target);
    tgt += '\n';
  }
  write_file(src_path, src);
  write_file(tgt_path, tgt);
}

void write_vocab_tsv(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::vector<std::pair<std::string, long long>> rows(vocab.counts.begin(), vocab.counts.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string out;
  for (const auto& [tok, n] : rows) {
    out += tok;
    out += '\t';
    out += std::to_string(n);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace lexmt
