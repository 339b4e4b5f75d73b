// lexmt: phrase-based SMT toolkit with lexicon augmentation.
// One subcommand per pipeline operation; `pipeline` runs them all.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexmt/align.hpp"
#include "lexmt/decoder.hpp"
#include "lexmt/eval.hpp"
#include "lexmt/lexicon.hpp"
#include "lexmt/lm.hpp"
#include "lexmt/morphgen.hpp"
#include "lexmt/phrase.hpp"
#include "lexmt/pipeline.hpp"
#include "lexmt/textprep.hpp"
#include "lexmt/tune.hpp"
#include "lexmt/util.hpp"

namespace fs = std::filesystem;
using namespace lexmt;

namespace {

std::vector<Tokens> read_tokenized(const fs::path& path) {
  std::vector<Tokens> out;
  for (const std::string& line : read_lines(path)) out.push_back(tokenize(line));
  return out;
}

// --corpus for `filter` is a source-side text file; wrap it as pairs with
// empty targets since filtration only inspects the source side.
std::vector<SentencePair> source_only_corpus(const fs::path& path) {
  std::vector<SentencePair> pairs;
  for (const Tokens& t : read_tokenized(path)) pairs.push_back({t, {}, Origin::corpus});
  return pairs;
}

int run(int argc, char** argv) {
  CLI::App app{"phrase-based statistical machine translation toolkit"};
  app.require_subcommand(1);

  // ---- tokenize ----
  auto* cmd_tok = app.add_subcommand("tokenize", "tokenize raw text, one sentence per line");
  std::string tok_in, tok_out, tok_lang;
  cmd_tok->add_option("--in", tok_in, "input text file")->required();
  cmd_tok->add_option("--out", tok_out, "output file (default: stdout)");
  cmd_tok->add_option("--lang", tok_lang, "language hint (si|ta|en)");
  cmd_tok->callback([&] {
    std::string text;
    for (const std::string& line : read_lines(tok_in)) {
      text += join(tokenize(line, tok_lang));
      text += '\n';
    }
    if (tok_out.empty())
      std::cout << text;
    else
      write_file(tok_out, text);
  });

  // ---- clean ----
  auto* cmd_clean = app.add_subcommand("clean", "length/ratio-clean a parallel corpus");
  std::string cl_in_src, cl_in_tgt, cl_out_src, cl_out_tgt;
  long long cl_max_len = 80;
  double cl_max_ratio = 9.0;
  cmd_clean->add_option("--in-src", cl_in_src, "source side input")->required();
  cmd_clean->add_option("--in-tgt", cl_in_tgt, "target side input")->required();
  cmd_clean->add_option("--out-src", cl_out_src, "source side output")->required();
  cmd_clean->add_option("--out-tgt", cl_out_tgt, "target side output")->required();
  cmd_clean->add_option("--max-len", cl_max_len, "max tokens per side (default 80)");
  cmd_clean->add_option("--max-ratio", cl_max_ratio, "max length ratio, strict (default 9.0)");
  cmd_clean->callback([&] {
    std::vector<SentencePair> pairs = read_parallel(cl_in_src, cl_in_tgt);
    std::vector<SentencePair> kept =
        clean(pairs, static_cast<std::size_t>(cl_max_len), cl_max_ratio);
    write_parallel(cl_out_src, cl_out_tgt, kept);
    std::cout << "kept " << kept.size() << " of " << pairs.size() << " pairs ("
              << (pairs.size() - kept.size()) << " removed)\n";
  });

  // ---- augment ----
  auto* cmd_aug = app.add_subcommand("augment", "inflect lexicon entries with case-marker rules");
  std::string aug_paradigms, aug_in, aug_out;
  cmd_aug->add_option("--paradigms", aug_paradigms, "paradigm TSV")->required();
  cmd_aug->add_option("--in", aug_in, "lexicon TSV in")->required();
  cmd_aug->add_option("--out", aug_out, "lexicon TSV out")->required();
  cmd_aug->callback([&] {
    std::vector<LexiconEntry> entries = load_lexicon(aug_in);
    std::vector<InflectionParadigm> paradigms = load_paradigms(aug_paradigms);
    auto [augmented, report] = augment_lexicon(entries, paradigms);
    save_lexicon(aug_out, augmented);
    std::cout << "entries before: " << entries.size() << "\n"
              << "entries after:  " << augmented.size() << "\n"
              << report.summary() << "\n";
  });

  // ---- filter ----
  auto* cmd_filt = app.add_subcommand("filter", "drop entries already covered by the corpus");
  std::string fl_mode = "token", fl_corpus, fl_in, fl_out, fl_report;
  cmd_filt->add_option("--mode", fl_mode, "token|phrase (default token)");
  cmd_filt->add_option("--corpus", fl_corpus, "training source text")->required();
  cmd_filt->add_option("--in", fl_in, "lexicon TSV in")->required();
  cmd_filt->add_option("--out", fl_out, "lexicon TSV out (kept entries)");
  cmd_filt->add_option("--report", fl_report, "per-entry kept/removed TSV");
  cmd_filt->callback([&] {
    FilterMode mode;
    if (fl_mode == "token")
      mode = FilterMode::token;
    else if (fl_mode == "phrase")
      mode = FilterMode::phrase;
    else
      fail("--mode must be token or phrase, got `" + fl_mode + "`");
    std::vector<LexiconEntry> entries = load_lexicon(fl_in);
    auto [kept, report] = filter_list(entries, source_only_corpus(fl_corpus), mode);
    if (!fl_out.empty()) save_lexicon(fl_out, kept);
    if (!fl_report.empty()) write_filter_report(fl_report, report);
    std::cout << "kept " << report.kept << ", removed " << report.removed << "\n";
    for (const FilterRow& row : report.rows)
      if (!row.kept) std::cout << "removed\t" << row.entry << "\t" << row.reason << "\n";
  });

  // ---- train-lm ----
  auto* cmd_lm = app.add_subcommand("train-lm", "train a backoff n-gram model, write ARPA");
  std::string lm_in, lm_out;
  long long lm_order = 3;
  cmd_lm->add_option("--in", lm_in, "tokenized training text")->required();
  cmd_lm->add_option("--order", lm_order, "n-gram order (default 3)");
  cmd_lm->add_option("--out", lm_out, "ARPA output path")->required();
  cmd_lm->callback([&] {
    NGramModel model = train_lm(read_tokenized(lm_in), static_cast<int>(lm_order));
    save_arpa(model, lm_out);
    std::cout << "wrote " << lm_out << " (order " << model.order << ")\n";
  });

  // ---- align ----
  auto* cmd_al = app.add_subcommand("align", "train word alignments and symmetrize");
  std::string al_src, al_tgt, al_out, al_out_fwd, al_out_rev;
  long long al_iters = 10, al_jobs = 1;
  cmd_al->add_option("--src", al_src, "source side text")->required();
  cmd_al->add_option("--tgt", al_tgt, "target side text")->required();
  cmd_al->add_option("--iterations", al_iters, "EM iterations (default 10)");
  cmd_al->add_option("--jobs", al_jobs, "worker threads (default 1)");
  cmd_al->add_option("--out", al_out, "symmetrized alignment output")->required();
  cmd_al->add_option("--out-fwd", al_out_fwd, "source-to-target alignment output");
  cmd_al->add_option("--out-rev", al_out_rev, "target-to-source alignment output");
  cmd_al->callback([&] {
    std::vector<SentencePair> pairs = read_parallel(al_src, al_tgt);
    std::vector<SentencePair> swapped;
    swapped.reserve(pairs.size());
    for (const SentencePair& p : pairs) swapped.push_back({p.target, p.source, p.origin});
    int it = static_cast<int>(al_iters), jb = static_cast<int>(al_jobs);
    TranslationTable t_fwd = train_model1(pairs, it, jb);
    TranslationTable t_rev = train_model1(swapped, it, jb);
    std::vector<AlignmentMatrix> fwd(pairs.size()), rev(pairs.size()), sym(pairs.size());
    parallel_for(pairs.size(), jb, [&](std::size_t i) {
      fwd[i] = viterbi_align(pairs[i], t_fwd);
      rev[i] = transpose(viterbi_align(swapped[i], t_rev));
      sym[i] = grow_diag_final_and(fwd[i], rev[i]);
    });
    write_alignments(al_out, sym);
    if (!al_out_fwd.empty()) write_alignments(al_out_fwd, fwd);
    if (!al_out_rev.empty()) write_alignments(al_out_rev, rev);
    std::cout << "aligned " << pairs.size() << " pairs\n";
  });

  // ---- phrases ----
  auto* cmd_ph = app.add_subcommand("phrases", "extract and score a phrase table");
  std::string ph_src, ph_tgt, ph_align, ph_out;
  long long ph_max_len = 7, ph_iters = 10, ph_jobs = 1;
  cmd_ph->add_option("--src", ph_src, "source side text")->required();
  cmd_ph->add_option("--tgt", ph_tgt, "target side text")->required();
  cmd_ph->add_option("--align", ph_align, "symmetrized alignment file")->required();
  cmd_ph->add_option("--max-len", ph_max_len, "max source phrase length (default 7)");
  cmd_ph->add_option("--iterations", ph_iters, "EM iterations for lexical weights (default 10)");
  cmd_ph->add_option("--jobs", ph_jobs, "worker threads (default 1)");
  cmd_ph->add_option("--out", ph_out, "phrase table output")->required();
  cmd_ph->callback([&] {
    std::vector<SentencePair> pairs = read_parallel(ph_src, ph_tgt);
    std::vector<std::string> lines = read_lines(ph_align);
    if (lines.size() != pairs.size())
      fail(ph_align + ": " + std::to_string(lines.size()) + " lines for " +
           std::to_string(pairs.size()) + " sentence pairs");
    std::vector<SentencePair> swapped;
    swapped.reserve(pairs.size());
    for (const SentencePair& p : pairs) swapped.push_back({p.target, p.source, p.origin});
    int it = static_cast<int>(ph_iters), jb = static_cast<int>(ph_jobs);
    TranslationTable t_fwd = train_model1(pairs, it, jb);
    TranslationTable t_rev = train_model1(swapped, it, jb);
    std::vector<std::vector<ExtractedPhrase>> per_pair(pairs.size());
    parallel_for(pairs.size(), jb, [&](std::size_t i) {
      AlignmentMatrix a =
          parse_alignment(lines[i], pairs[i].source.size(), pairs[i].target.size());
      per_pair[i] = extract_phrases(pairs[i], a, static_cast<std::size_t>(ph_max_len));
    });
    std::vector<ExtractedPhrase> extracted;
    for (auto& v : per_pair) extracted.insert(extracted.end(), v.begin(), v.end());
    PhraseTable table = score_phrases(extracted, t_fwd, t_rev);
    save_phrase_table(table, ph_out);
    std::cout << "extracted " << extracted.size() << " phrase instances, "
              << table.entries.size() << " distinct source phrases\n";
  });

  // ---- tune ----
  auto* cmd_tune = app.add_subcommand("tune", "minimum error rate training on a dev set");
  std::string tn_table, tn_lm, tn_dev_src, tn_dev_tgt, tn_out, tn_trace, tn_init;
  long long tn_nbest = 100, tn_iters = 10, tn_restarts = 8, tn_seed = 1, tn_jobs = 1;
  long long tn_stack = 100, tn_dl = 6;
  cmd_tune->add_option("--table", tn_table, "phrase table")->required();
  cmd_tune->add_option("--lm", tn_lm, "ARPA language model")->required();
  cmd_tune->add_option("--dev-src", tn_dev_src, "dev source text")->required();
  cmd_tune->add_option("--dev-tgt", tn_dev_tgt, "dev reference text")->required();
  cmd_tune->add_option("--out", tn_out, "weights output")->required();
  cmd_tune->add_option("--init", tn_init, "initial weights file (default: built-ins)");
  cmd_tune->add_option("--trace", tn_trace, "per-iteration BLEU trace TSV");
  cmd_tune->add_option("--nbest", tn_nbest, "n-best size (default 100)");
  cmd_tune->add_option("--max-iterations", tn_iters, "outer iterations (default 10)");
  cmd_tune->add_option("--restarts", tn_restarts, "random restarts (default 8)");
  cmd_tune->add_option("--seed", tn_seed, "restart RNG seed (default 1)");
  cmd_tune->add_option("--jobs", tn_jobs, "worker threads (default 1)");
  cmd_tune->add_option("--stack-size", tn_stack, "decoder stack size (default 100)");
  cmd_tune->add_option("--distortion-limit", tn_dl, "decoder distortion limit (default 6)");
  cmd_tune->callback([&] {
    PhraseTable table = load_phrase_table(tn_table);
    NGramModel lm = load_arpa(tn_lm);
    std::vector<SentencePair> dev = read_parallel(tn_dev_src, tn_dev_tgt);
    MertParams mp;
    mp.nbest_size = static_cast<int>(tn_nbest);
    mp.max_iterations = static_cast<int>(tn_iters);
    mp.random_restarts = static_cast<int>(tn_restarts);
    mp.seed = static_cast<std::uint64_t>(tn_seed);
    mp.jobs = static_cast<int>(tn_jobs);
    mp.decoder.stack_size = static_cast<int>(tn_stack);
    mp.decoder.distortion_limit = static_cast<int>(tn_dl);
    FeatureWeights init;
    if (!tn_init.empty()) init = load_weights(tn_init);
    MertResult mr = mert(dev, init, table, lm, mp);
    save_weights(mr.weights, tn_out);
    if (!tn_trace.empty()) write_mert_trace(tn_trace, mr.iterations);
    for (std::size_t i = 0; i < mr.iterations.size(); ++i)
      std::cout << "iteration " << (i + 1) << ": pool " << mr.iterations[i].pool_size
                << ", dev BLEU " << fmt_fixed(mr.iterations[i].bleu_after * 100.0, 2)
                << "\n";
  });

  // ---- translate ----
  auto* cmd_tr = app.add_subcommand("translate", "decode source text to the target language");
  std::string tr_table, tr_lm, tr_weights, tr_in, tr_out, tr_oov_out, tr_nbest_out;
  long long tr_nbest = 0, tr_jobs = 1, tr_stack = 100, tr_dl = 6;
  cmd_tr->add_option("--table", tr_table, "phrase table")->required();
  cmd_tr->add_option("--lm", tr_lm, "ARPA language model")->required();
  cmd_tr->add_option("--weights", tr_weights, "weights file (default: built-ins)");
  cmd_tr->add_option("--in", tr_in, "source text, one sentence per line")->required();
  cmd_tr->add_option("--out", tr_out, "translation output (default: stdout)");
  cmd_tr->add_option("--oov-out", tr_oov_out, "OOV passthrough list (sent_id<TAB>token)");
  cmd_tr->add_option("--nbest", tr_nbest, "also write an n-best list of this size");
  cmd_tr->add_option("--nbest-out", tr_nbest_out, "n-best output path");
  cmd_tr->add_option("--jobs", tr_jobs, "worker threads (default 1)");
  cmd_tr->add_option("--stack-size", tr_stack, "stack size (default 100)");
  cmd_tr->add_option("--distortion-limit", tr_dl, "distortion limit (default 6)");
  cmd_tr->callback([&] {
    if (tr_nbest > 0 && tr_nbest_out.empty()) fail("--nbest needs --nbest-out");
    PhraseTable table = load_phrase_table(tr_table);
    NGramModel lm = load_arpa(tr_lm);
    FeatureWeights weights;
    if (!tr_weights.empty()) weights = load_weights(tr_weights);
    DecoderParams dp;
    dp.stack_size = static_cast<int>(tr_stack);
    dp.distortion_limit = static_cast<int>(tr_dl);
    std::vector<Tokens> sources = read_tokenized(tr_in);
    int n = static_cast<int>(tr_nbest);
    std::vector<std::vector<Derivation>> lists(sources.size());
    parallel_for(sources.size(), static_cast<int>(tr_jobs), [&](std::size_t i) {
      lists[i] = nbest(sources[i], table, lm, weights, n > 0 ? n : 1, dp);
    });
    std::string out_text, oov_text;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const Derivation& best = lists[i].front();
      out_text += join(best.target);
      out_text += '\n';
      for (std::size_t k = 0; k < best.target.size(); ++k)
        if (best.oov_flags[k])
          oov_text += std::to_string(i) + "\t" + best.target[k] + "\n";
    }
    if (tr_out.empty())
      std::cout << out_text;
    else
      write_file(tr_out, out_text);
    if (tr_oov_out.empty())
      std::cerr << oov_text;
    else
      write_file(tr_oov_out, oov_text);
    if (n > 0) write_nbest(tr_nbest_out, lists);
  });

  // ---- evaluate ----
  auto* cmd_ev = app.add_subcommand("evaluate", "corpus BLEU and OOV rate");
  std::string ev_cand, ev_ref, ev_table, ev_source;
  cmd_ev->add_option("--candidates", ev_cand, "candidate translations")->required();
  cmd_ev->add_option("--references", ev_ref, "reference translations")->required();
  cmd_ev->add_option("--table", ev_table, "phrase table, for OOV counting");
  cmd_ev->add_option("--source", ev_source, "test source text, for OOV counting");
  cmd_ev->callback([&] {
    BleuResult br = bleu(read_tokenized(ev_cand), read_tokenized(ev_ref));
    std::cout << "bleu_x100\t" << fmt_fixed(br.score * 100.0, 2) << "\n";
    for (int i = 0; i < 4; ++i)
      std::cout << "p" << (i + 1) << "\t" << fmt_fixed(br.precisions[i], 6) << "\n";
    std::cout << "brevity_penalty\t" << fmt_fixed(br.brevity_penalty, 6) << "\n"
              << "candidate_length\t" << br.candidate_length << "\n"
              << "reference_length\t" << br.reference_length << "\n";
    if (!ev_table.empty() != !ev_source.empty())
      fail("--table and --source must be given together");
    if (!ev_table.empty()) {
      PhraseTable table = load_phrase_table(ev_table);
      std::vector<Tokens> src = read_tokenized(ev_source);
      std::cout << "oov_tokens\t" << oov_count(src, table, OovMode::tokens) << "\n"
                << "oov_types\t" << oov_count(src, table, OovMode::types) << "\n";
    }
  });

  // ---- pipeline ----
  auto* cmd_pipe = app.add_subcommand("pipeline", "run the full train-tune-decode-evaluate flow");
  std::string pp_config, pp_out;
  long long pp_jobs = 1;
  cmd_pipe->add_option("--config", pp_config, "experiment config file")->required();
  cmd_pipe->add_option("--out", pp_out, "run directory")->required();
  cmd_pipe->add_option("--jobs", pp_jobs, "worker threads (default 1)");
  cmd_pipe->callback([&] {
    PipelineResult res = run_pipeline(pp_config, pp_out, static_cast<int>(pp_jobs));
    std::cout << "bleu_x100\t" << fmt_fixed(res.bleu * 100.0, 2) << "\n"
              << "oov_tokens\t" << res.oov_tokens << "\n"
              << "oov_types\t" << res.oov_types << "\n"
              << "passthrough_tokens\t" << res.passthrough_tokens << "\n"
              << "report\t" << res.report_path.string() << "\n";
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "lexmt: " << e.what() << "\n";
    return 1;
  }
}
