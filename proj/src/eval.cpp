#include "lexmt/eval.hpp"

#include <cmath>
#include <map>

#include "lexmt/util.hpp"

namespace lexmt {

namespace {

std::map<std::string, long long> ngram_counts(const Tokens& toks, int n) {
  std::map<std::string, long long> out;
  if (static_cast<int>(toks.size()) < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int k = 1; k < n; ++k) {
      key += ' ';
      key += toks[i + k];
    }
    ++out[key];
  }
  return out;
}

}  // namespace

BleuResult bleu(const std::vector<Tokens>& candidates,
                const std::vector<Tokens>& references, int max_n,
                bool smooth_plus_one) {
  if (candidates.empty()) fail("bleu: empty candidate list");
  if (candidates.size() != references.size())
    fail("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
         std::to_string(references.size()) + " references");
  if (max_n < 1 || max_n > 4) fail("bleu: max_n must be in [1,4]");

  BleuResult r;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    const Tokens& cand = candidates[s];
    const Tokens& ref = references[s];
    r.candidate_length += static_cast<long long>(cand.size());
    r.reference_length += static_cast<long long>(ref.size());
    for (int n = 1; n <= max_n; ++n) {
      auto cand_counts = ngram_counts(cand, n);
      auto ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, c] : cand_counts) {
        r.totals[n - 1] += c;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          r.matches[n - 1] += std::min(c, it->second);
      }
    }
  }

  if (r.candidate_length == 0) {
    r.brevity_penalty = 0.0;
    r.score = 0.0;
    return r;
  }
  double ratio = static_cast<double>(r.reference_length) /
                 static_cast<double>(r.candidate_length);
  r.brevity_penalty = std::min(1.0, std::exp(1.0 - ratio));

  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= max_n; ++n) {
    double m = static_cast<double>(r.matches[n - 1]);
    double t = static_cast<double>(r.totals[n - 1]);
    double p;
    if (r.matches[n - 1] == 0 && smooth_plus_one)
      p = (m + 1.0) / (t + 1.0);
    else if (t == 0.0 || m == 0.0)
      p = 0.0;
    else
      p = m / t;
    r.precisions[n - 1] = p;
    if (p <= 0.0)
      zero = true;
    else
      log_sum += std::log(p);
  }
  r.score = zero ? 0.0
                 : r.brevity_penalty * std::exp(log_sum / max_n);
  return r;
}

long long oov_count(const std::vector<Tokens>& test_source,
                    const std::set<std::string>& vocab, OovMode mode) {
  if (mode == OovMode::tokens) {
    long long n = 0;
    for (const Tokens& sent : test_source)
      for (const std::string& tok : sent)
        if (!vocab.count(tok)) ++n;
    return n;
  }
  std::set<std::string> missing;
  for (const Tokens& sent : test_source)
    for (const std::string& tok : sent)
      if (!vocab.count(tok)) missing.insert(tok);
  return static_cast<long long>(missing.size());
}

long long oov_count(const std::vector<Tokens>& test_source,
                    const PhraseTable& table, OovMode mode) {
  return oov_count(test_source, table.source_vocabulary(), mode);
}

}  // namespace lexmt
