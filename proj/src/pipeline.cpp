#include "lexmt/pipeline.hpp"

#include <algorithm>
#include <cstdlib>

#include "lexmt/align.hpp"
#include "lexmt/decoder.hpp"
#include "lexmt/eval.hpp"
#include "lexmt/lexicon.hpp"
#include "lexmt/lm.hpp"
#include "lexmt/morphgen.hpp"
#include "lexmt/phrase.hpp"
#include "lexmt/textprep.hpp"
#include "lexmt/tune.hpp"
#include "lexmt/util.hpp"

namespace fs = std::filesystem;

namespace lexmt {

std::string Config::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) fail("config: missing key `" + key + "`");
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& dflt) const {
  auto it = values.find(key);
  return it == values.end() ? dflt : it->second;
}

fs::path Config::get_path(const std::string& key) const {
  fs::path p = get(key);
  return p.is_absolute() ? p : base_dir / p;
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  auto it = values.find(key);
  if (it == values.end()) return dflt;
  const std::string& v = it->second;
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail("config: `" + key + "` must be a boolean, got `" + v + "`");
}

long long Config::get_int(const std::string& key, long long dflt) const {
  auto it = values.find(key);
  return it == values.end() ? dflt
                            : std::strtoll(it->second.c_str(), nullptr, 10);
}

double Config::get_double(const std::string& key, double dflt) const {
  auto it = values.find(key);
  return it == values.end() ? dflt : std::strtod(it->second.c_str(), nullptr);
}

Config load_config(const fs::path& path) {
  Config cfg;
  cfg.raw = read_file(path);
  cfg.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::string section;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::string s = line;
    // strip comments and surrounding blanks
    auto hash = s.find('#');
    if (hash != std::string::npos) s.resize(hash);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    s = s.substr(b);
    if (s.empty()) continue;
    if (s.front() == '[' && s.back() == ']') {
      section = s.substr(1, s.size() - 2);
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(path.string() + ":" + std::to_string(lineno) +
           ": want `key = value` or `[section]`");
    std::string key = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    std::size_t vb = 0;
    while (vb < val.size() && (val[vb] == ' ' || val[vb] == '\t')) ++vb;
    val = val.substr(vb);
    if (key.empty())
      fail(path.string() + ":" + std::to_string(lineno) + ": empty key");
    cfg.values[section.empty() ? key : section + "." + key] = val;
  }
  return cfg;
}

namespace {

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) fail("missing input file: " + p.string());
}

void truecase_side(std::vector<SentencePair>& pairs, Side side,
                   const TruecaseModel& model) {
  for (SentencePair& p : pairs) {
    Tokens& toks = side == Side::source ? p.source : p.target;
    toks = truecase(toks, model);
  }
}

std::vector<Tokens> side_of(const std::vector<SentencePair>& pairs,
                            Side side) {
  std::vector<Tokens> out;
  out.reserve(pairs.size());
  for (const SentencePair& p : pairs)
    out.push_back(side == Side::source ? p.source : p.target);
  return out;
}

std::vector<SentencePair> swap_sides(const std::vector<SentencePair>& pairs) {
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (const SentencePair& p : pairs)
    out.push_back({p.target, p.source, p.origin});
  return out;
}

}  // namespace

PipelineResult run_pipeline(const fs::path& config_path, const fs::path& out_dir,
                            int jobs) {
  Config cfg = load_config(config_path);
  const std::string run_id = cfg.get("run.id");
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("run.seed", 1));
  const std::string src_lang = cfg.get_or("data.source_lang", "si");
  const std::string tgt_lang = cfg.get_or("data.target_lang", "en");
  const std::string direction =
      cfg.get_or("run.direction", src_lang + "-" + tgt_lang);

  for (const char* d :
       {"01_clean", "02_lists", "03_align", "04_phrases", "05_lm", "06_tune",
        "07_decode", "08_eval"})
    fs::create_directories(out_dir / d);

  // ---- 01_clean: tokenize, truecase the English side, ratio-clean ----
  fs::path train_src = cfg.get_path("data.train_source");
  fs::path train_tgt = cfg.get_path("data.train_target");
  fs::path test_src = cfg.get_path("data.test_source");
  fs::path test_tgt = cfg.get_path("data.test_target");
  for (const fs::path& p : {train_src, train_tgt, test_src, test_tgt})
    require_exists(p);

  std::vector<SentencePair> train = read_parallel(train_src, train_tgt);
  std::vector<SentencePair> test = read_parallel(test_src, test_tgt);
  std::vector<SentencePair> dev;
  bool have_dev = cfg.has("data.dev_source");
  if (have_dev) {
    fs::path dev_src = cfg.get_path("data.dev_source");
    fs::path dev_tgt = cfg.get_path("data.dev_target");
    require_exists(dev_src);
    require_exists(dev_tgt);
    dev = read_parallel(dev_src, dev_tgt);
  }

  TruecaseModel tc;
  auto truecase_all = [&](Side side) {
    tc = train_truecase(side_of(train, side));
    truecase_side(train, side, tc);
    truecase_side(test, side, tc);
    if (have_dev) truecase_side(dev, side, tc);
  };
  if (tgt_lang == "en")
    truecase_all(Side::target);
  else if (src_lang == "en")
    truecase_all(Side::source);

  train = clean(train, static_cast<std::size_t>(cfg.get_int("train.max_len", 80)),
                cfg.get_double("train.max_ratio", 9.0));
  if (train.empty()) fail("cleaning removed every training pair");

  write_parallel(out_dir / "01_clean/train.src", out_dir / "01_clean/train.tgt",
                 train);
  write_parallel(out_dir / "01_clean/test.src", out_dir / "01_clean/test.tgt",
                 test);
  if (have_dev)
    write_parallel(out_dir / "01_clean/dev.src", out_dir / "01_clean/dev.tgt",
                   dev);
  write_vocab_tsv(out_dir / "01_clean/vocab.src.tsv",
                  build_vocab(train, Side::source));
  write_vocab_tsv(out_dir / "01_clean/vocab.tgt.tsv",
                  build_vocab(train, Side::target));
  // Reload so downstream stages see exactly the serialized artifact.
  train = read_parallel(out_dir / "01_clean/train.src",
                        out_dir / "01_clean/train.tgt");
  test = read_parallel(out_dir / "01_clean/test.src",
                       out_dir / "01_clean/test.tgt");
  if (have_dev)
    dev = read_parallel(out_dir / "01_clean/dev.src",
                        out_dir / "01_clean/dev.tgt");

  // ---- 02_lists: augment, filter, integrate ----
  static const std::array<const char*, 3> kSlots = {"dictionary", "glossary",
                                                    "names"};
  bool any_list = false;
  for (const char* slot : kSlots) any_list |= cfg.has(std::string("lists.") + slot);

  const bool augment_on = cfg.get_bool("augment.enabled", false);
  FilterMode fmode = FilterMode::off;
  {
    std::string m = cfg.get_or("filter.mode", "off");
    if (m == "token")
      fmode = FilterMode::token;
    else if (m == "phrase")
      fmode = FilterMode::phrase;
    else if (m != "off")
      fail("config: filter.mode must be token|phrase|off, got `" + m + "`");
  }
  if (fmode != FilterMode::off && !any_list)
    fail("config: filter.mode set but no lists configured");

  std::vector<InflectionParadigm> paradigms;
  if (augment_on) {
    fs::path pp = cfg.get_path("augment.paradigms");
    require_exists(pp);
    paradigms = load_paradigms(pp);
  }

  std::vector<LexiconEntry> final_lists;
  std::string augment_log;
  for (const char* slot : kSlots) {
    std::string key = std::string("lists.") + slot;
    if (!cfg.has(key)) continue;
    fs::path lp = cfg.get_path(key);
    require_exists(lp);
    std::vector<LexiconEntry> entries = load_lexicon(lp);
    if (augment_on) {
      auto [augmented, report] = augment_lexicon(entries, paradigms);
      entries = std::move(augmented);
      augment_log += std::string(slot) + ": " + report.summary() + "\n";
      save_lexicon(out_dir / "02_lists" / (std::string(slot) + ".aug.tsv"),
                   entries);
    }
    if (fmode != FilterMode::off) {
      auto [kept, report] = filter_list(entries, train, fmode);
      entries = std::move(kept);
      write_filter_report(
          out_dir / "02_lists" / (std::string(slot) + ".filter.tsv"), report);
    }
    save_lexicon(out_dir / "02_lists" / (std::string(slot) + ".final.tsv"),
                 entries);
    entries = load_lexicon(out_dir / "02_lists" /
                           (std::string(slot) + ".final.tsv"));
    final_lists.insert(final_lists.end(), entries.begin(), entries.end());
  }
  if (augment_on)
    write_file(out_dir / "02_lists/augment_report.txt", augment_log);

  std::vector<SentencePair> integrated = integrate(train, final_lists);
  write_parallel(out_dir / "02_lists/integrated.src",
                 out_dir / "02_lists/integrated.tgt", integrated);
  integrated = read_parallel(out_dir / "02_lists/integrated.src",
                             out_dir / "02_lists/integrated.tgt");

  // ---- 03_align: Model 1 both ways, grow-diag-final-and ----
  const int em_iters = static_cast<int>(cfg.get_int("train.em_iterations", 10));
  TranslationTable t_src_given_tgt = train_model1(integrated, em_iters, jobs);
  TranslationTable t_tgt_given_src =
      train_model1(swap_sides(integrated), em_iters, jobs);

  std::vector<AlignmentMatrix> fwd(integrated.size()), rev(integrated.size()),
      sym(integrated.size());
  parallel_for(integrated.size(), jobs, [&](std::size_t i) {
    fwd[i] = viterbi_align(integrated[i], t_src_given_tgt);
    SentencePair swapped{integrated[i].target, integrated[i].source,
                         integrated[i].origin};
    rev[i] = transpose(viterbi_align(swapped, t_tgt_given_src));
    sym[i] = grow_diag_final_and(fwd[i], rev[i]);
  });
  write_alignments(out_dir / "03_align/fwd.align", fwd);
  write_alignments(out_dir / "03_align/rev.align", rev);
  write_alignments(out_dir / "03_align/sym.align", sym);

  // ---- 04_phrases ----
  const std::size_t max_phrase_len =
      static_cast<std::size_t>(cfg.get_int("train.max_phrase_len", 7));
  std::vector<std::vector<ExtractedPhrase>> per_pair(integrated.size());
  parallel_for(integrated.size(), jobs, [&](std::size_t i) {
    per_pair[i] = extract_phrases(integrated[i], sym[i], max_phrase_len);
  });
  std::vector<ExtractedPhrase> extracted;
  for (auto& v : per_pair)
    extracted.insert(extracted.end(), v.begin(), v.end());
  PhraseTable table =
      score_phrases(extracted, t_src_given_tgt, t_tgt_given_src);
  save_phrase_table(table, (out_dir / "04_phrases/phrase_table.txt").string());
  table = load_phrase_table((out_dir / "04_phrases/phrase_table.txt").string());

  // ---- 05_lm: target-side model, constant across list configurations ----
  const int lm_order = static_cast<int>(cfg.get_int("train.lm_order", 3));
  NGramModel lm = train_lm(side_of(train, Side::target), lm_order);
  save_arpa(lm, (out_dir / "05_lm/lm.arpa").string());
  lm = load_arpa((out_dir / "05_lm/lm.arpa").string());

  // ---- 06_tune ----
  DecoderParams dparams;
  dparams.stack_size = static_cast<int>(cfg.get_int("decode.stack_size", 100));
  dparams.distortion_limit =
      static_cast<int>(cfg.get_int("decode.distortion_limit", 6));

  bool tune_on = cfg.get_bool("tune.enabled", have_dev);
  if (tune_on && !have_dev)
    fail("config: tune.enabled but no dev_source/dev_target given");
  FeatureWeights weights;
  if (tune_on) {
    MertParams mp;
    mp.nbest_size = static_cast<int>(cfg.get_int("tune.nbest", 100));
    mp.max_iterations = static_cast<int>(cfg.get_int("tune.max_iterations", 10));
    mp.random_restarts = static_cast<int>(cfg.get_int("tune.restarts", 8));
    mp.seed = seed;
    mp.jobs = jobs;
    mp.decoder = dparams;
    MertResult mr = mert(dev, FeatureWeights{}, table, lm, mp);
    weights = mr.weights;
    write_mert_trace((out_dir / "06_tune/trace.txt").string(), mr.iterations);
  }
  save_weights(weights, (out_dir / "06_tune/weights.txt").string());
  weights = load_weights((out_dir / "06_tune/weights.txt").string());

  // ---- 07_decode ----
  std::vector<Derivation> outputs(test.size());
  parallel_for(test.size(), jobs, [&](std::size_t i) {
    outputs[i] = decode(test[i].source, table, lm, weights, dparams);
  });
  std::string out_text, oov_text;
  long long passthrough = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    out_text += join(outputs[i].target);
    out_text += '\n';
    for (std::size_t k = 0; k < outputs[i].target.size(); ++k)
      if (outputs[i].oov_flags[k]) {
        oov_text += std::to_string(i);
        oov_text += '\t';
        oov_text += outputs[i].target[k];
        oov_text += '\n';
        ++passthrough;
      }
  }
  write_file(out_dir / "07_decode/output.txt", out_text);
  write_file(out_dir / "07_decode/oov.txt", oov_text);

  // ---- 08_eval ----
  std::vector<Tokens> candidates;
  candidates.reserve(outputs.size());
  for (const Derivation& d : outputs) candidates.push_back(d.target);
  BleuResult br = bleu(candidates, side_of(test, Side::target));
  long long oov_tok = oov_count(side_of(test, Side::source), table,
                                OovMode::tokens);
  long long oov_typ = oov_count(side_of(test, Side::source), table,
                                OovMode::types);

  std::string report =
      "config_id\tdirection\tbleu_x100\toov_tokens\toov_types\n";
  report += run_id + "\t" + direction + "\t" + fmt_fixed(br.score * 100.0, 2) +
            "\t" + std::to_string(oov_tok) + "\t" + std::to_string(oov_typ) +
            "\n";
  fs::path report_path = out_dir / "08_eval/score_report.tsv";
  write_file(report_path, report);

  std::string manifest;
  manifest += "config_hash = " + hex64(fnv1a64(cfg.raw)) + "\n";
  manifest += "seed = " + std::to_string(seed) + "\n";
  write_file(out_dir / "manifest.txt", manifest);

  PipelineResult res;
  res.bleu = br.score;
  res.oov_tokens = oov_tok;
  res.oov_types = oov_typ;
  res.passthrough_tokens = passthrough;
  res.report_path = report_path;
  return res;
}

}  // namespace lexmt
