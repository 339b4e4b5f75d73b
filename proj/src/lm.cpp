#include "lexmt/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lexmt/phrase.hpp"  // good_turing_discount

namespace lexmt {

namespace {

double to_log10(double p) {
  if (p < 1e-99) return NGramModel::kLogFloor;
  return std::log10(p);
}

}  // namespace

std::vector<std::map<Tokens, long long>> count_ngrams(
    const std::vector<Tokens>& corpus, int order) {
  std::vector<std::map<Tokens, long long>> counts(order);
  for (const Tokens& sent : corpus) {
    Tokens padded;
    padded.reserve(sent.size() + 2);
    padded.push_back(NGramModel::kBos);
    padded.insert(padded.end(), sent.begin(), sent.end());
    padded.push_back(NGramModel::kEos);
    for (int n = 1; n <= order; ++n) {
      if (padded.size() < static_cast<std::size_t>(n)) continue;
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        Tokens gram(padded.begin() + i, padded.begin() + i + n);
        ++counts[n - 1][std::move(gram)];
      }
    }
  }
  return counts;
}

double NGramModel::cond_logp(const Tokens& context,
                             const std::string& word) const {
  Tokens ctx = context;
  if (static_cast<int>(ctx.size()) > order - 1)
    ctx.erase(ctx.begin(), ctx.end() - (order - 1));
  double acc = 0.0;
  for (;;) {
    std::string key = ctx.empty() ? word : join(ctx) + " " + word;
    int n = static_cast<int>(ctx.size()) + 1;
    if (has(key, n)) return acc + grams[n - 1].at(key).logp;
    if (ctx.empty()) return acc + kLogFloor;
    std::string ctx_key = join(ctx);
    if (has(ctx_key, static_cast<int>(ctx.size())))
      acc += grams[ctx.size() - 1].at(ctx_key).bow;
    ctx.erase(ctx.begin());
  }
}

const std::string& NGramModel::vocab_map(const std::string& tok) const {
  static const std::string unk = kUnk;
  if (!grams.empty() && grams[0].count(tok)) return tok;
  return unk;
}

double NGramModel::score_sequence(const Tokens& tokens) const {
  Tokens mapped;
  mapped.reserve(tokens.size() + 2);
  mapped.push_back(kBos);
  for (const std::string& t : tokens) mapped.push_back(vocab_map(t));
  mapped.push_back(kEos);
  double total = 0.0;
  for (std::size_t i = 1; i < mapped.size(); ++i) {
    std::size_t lo = i >= static_cast<std::size_t>(order - 1)
                         ? i - (order - 1)
                         : 0;
    Tokens ctx(mapped.begin() + lo, mapped.begin() + i);
    total += cond_logp(ctx, mapped[i]);
  }
  return total;
}

double score_sequence(const NGramModel& model, const Tokens& tokens) {
  return model.score_sequence(tokens);
}

NGramModel train_lm(const std::vector<Tokens>& corpus, int order) {
  if (corpus.empty()) fail("train_lm: empty corpus");
  if (order < 1) fail("train_lm: order must be >= 1");

  auto counts = count_ngrams(corpus, order);
  NGramModel model;
  model.order = order;
  model.grams.assign(order, {});

  // Per-order Good-Turing discount functions over count-of-counts.  The
  // unigram histogram skips <s>, which is a context rather than an event.
  std::vector<std::function<double(long long)>> discount(order);
  for (int n = 1; n <= order; ++n) {
    CountHistogram hist;
    for (const auto& [gram, c] : counts[n - 1]) {
      if (n == 1 && gram[0] == NGramModel::kBos) continue;
      ++hist[c];
    }
    discount[n - 1] = good_turing_discount(hist);
  }

  // Unigrams.  T excludes <s>; freed mass funds <unk>.
  {
    long long total = 0;
    for (const auto& [gram, c] : counts[0])
      if (gram[0] != NGramModel::kBos) total += c;
    if (total <= 0) fail("train_lm: corpus has no tokens");
    double seen_mass = 0.0;
    for (const auto& [gram, c] : counts[0]) {
      if (gram[0] == NGramModel::kBos) continue;
      double p = discount[0](c) / static_cast<double>(total);
      seen_mass += p;
      model.grams[0][gram[0]] = {to_log10(p), 0.0};
    }
    double unk_mass = std::max(0.0, 1.0 - seen_mass);
    model.grams[0][NGramModel::kUnk] = {to_log10(unk_mass), 0.0};
    model.grams[0][NGramModel::kBos] = {NGramModel::kLogFloor, 0.0};
  }

  // Higher orders, bottom up: conditional probabilities against the
  // continuation sum of the context, then backoff weights as residuals.
  for (int n = 2; n <= order; ++n) {
    std::map<Tokens, long long> ctx_sum;
    for (const auto& [gram, c] : counts[n - 1]) {
      Tokens ctx(gram.begin(), gram.end() - 1);
      ctx_sum[ctx] += c;
    }
    for (const auto& [gram, c] : counts[n - 1]) {
      Tokens ctx(gram.begin(), gram.end() - 1);
      double p = discount[n - 1](c) / static_cast<double>(ctx_sum[ctx]);
      model.grams[n - 1][join(gram)] = {to_log10(p), 0.0};
    }
    // Backoff weight for every context of this order's events: the mass
    // left over at this order divided by the lower-order mass of the same
    // continuation set.
    std::map<Tokens, std::pair<double, double>> residual;  // seen_p, seen_lower
    std::map<Tokens, std::vector<std::string>> members;
    for (const auto& [gram, c] : counts[n - 1]) {
      (void)c;
      Tokens ctx(gram.begin(), gram.end() - 1);
      Tokens lower_ctx(ctx.begin() + 1, ctx.end());
      auto& [seen_p, seen_lower] = residual[ctx];
      std::string key = join(gram);
      seen_p += std::pow(10.0, model.grams[n - 1].at(key).logp);
      seen_lower += std::pow(10.0, model.cond_logp(lower_ctx, gram.back()));
      members[ctx].push_back(std::move(key));
    }
    for (const auto& [ctx, r] : residual) {
      double num = 1.0 - r.first;
      double den = 1.0 - r.second;
      double bow;
      if (den < 1e-12) {
        // Saturated context: the lower order gives the observed
        // continuations everything it has, so the discounted mass has no
        // event to fall back onto.  Renormalize the observed estimates
        // instead of leaking that mass.
        double scale = to_log10(r.first);
        for (const std::string& key : members[ctx])
          model.grams[n - 1].at(key).logp -= scale;
        bow = 1.0;
      } else {
        bow = std::max(num, 0.0) / den;
      }
      auto it = model.grams[ctx.size() - 1].find(join(ctx));
      if (it != model.grams[ctx.size() - 1].end())
        it->second.bow = to_log10(bow);
    }
  }
  return model;
}

void save_arpa(const NGramModel& model, const std::string& path) {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= model.order; ++n)
    out += "ngram " + std::to_string(n) + "=" +
           std::to_string(model.grams[n - 1].size()) + "\n";
  for (int n = 1; n <= model.order; ++n) {
    out += "\n\\" + std::to_string(n) + "-grams:\n";
    for (const auto& [gram, e] : model.grams[n - 1]) {
      out += fmt_fixed(e.logp, 6);
      out += '\t';
      out += gram;
      if (n < model.order) {
        out += '\t';
        out += fmt_fixed(e.bow, 6);
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  write_file(path, out);
}

NGramModel load_arpa(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  NGramModel model;
  model.order = 0;
  std::size_t i = 0;
  while (i < lines.size() && lines[i] != "\\data\\") ++i;
  if (i == lines.size()) fail(path + ": no \\data\\ header");
  ++i;
  std::vector<std::size_t> declared;
  for (; i < lines.size() && lines[i].rfind("ngram ", 0) == 0; ++i) {
    auto eq = lines[i].find('=');
    if (eq == std::string::npos) fail(path + ": bad ngram count line");
    declared.push_back(std::strtoull(lines[i].substr(eq + 1).c_str(),
                                     nullptr, 10));
  }
  model.order = static_cast<int>(declared.size());
  if (model.order < 1) fail(path + ": no ngram counts declared");
  model.grams.assign(model.order, {});

  int cur = 0;
  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line == "\\end\\") break;
    if (line[0] == '\\' && line.back() == ':') {
      cur = std::atoi(line.c_str() + 1);
      if (cur < 1 || cur > model.order)
        fail(path + ": unexpected section " + line);
      continue;
    }
    if (cur == 0) fail(path + ": entry before any section");
    std::vector<std::string> fields = split_tab(line);
    bool has_bow = cur < model.order;
    if (fields.size() != (has_bow ? 3u : 2u))
      fail(path + ": bad field count in " + std::to_string(cur) +
           "-gram line: " + line);
    NGramModel::Entry e;
    e.logp = std::strtod(fields[0].c_str(), nullptr);
    if (has_bow) e.bow = std::strtod(fields[2].c_str(), nullptr);
    model.grams[cur - 1][fields[1]] = e;
  }
  for (int n = 1; n <= model.order; ++n)
    if (model.grams[n - 1].size() != declared[n - 1])
      fail(path + ": declared " + std::to_string(declared[n - 1]) + " " +
           std::to_string(n) + "-grams, found " +
           std::to_string(model.grams[n - 1].size()));
  return model;
}

}  // namespace lexmt
