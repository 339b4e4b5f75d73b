// Python bindings for the toolkit's main operations: text preparation,
// lexicon augmentation and filtration, alignment, phrase extraction,
// language modeling, decoding, evaluation, tuning, and the end-to-end
// pipeline runner.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

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

namespace py = pybind11;
using namespace lexmt;

namespace {

Origin origin_from_string(const std::string& s) {
  if (s == "corpus") return Origin::corpus;
  if (s == "list") return Origin::list;
  if (s == "augmented_list") return Origin::augmented_list;
  throw std::invalid_argument("unknown origin: " + s);
}

std::string origin_to_string(Origin o) {
  switch (o) {
    case Origin::corpus: return "corpus";
    case Origin::list: return "list";
    case Origin::augmented_list: return "augmented_list";
  }
  return "corpus";
}

FilterMode filter_mode_from_string(const std::string& s) {
  if (s == "token") return FilterMode::token;
  if (s == "phrase") return FilterMode::phrase;
  if (s == "off") return FilterMode::off;
  throw std::invalid_argument("unknown filter mode: " + s);
}

// One call covering the pipeline's alignment stage: EM in both
// directions, per-pair argmax alignments, symmetrization.
std::vector<AlignmentMatrix> align_corpus(const std::vector<SentencePair>& pairs,
                                          int iterations, int jobs) {
  TranslationTable fwd = train_model1(pairs, iterations, jobs);
  std::vector<SentencePair> swapped;
  swapped.reserve(pairs.size());
  for (const SentencePair& p : pairs)
    swapped.push_back({p.target, p.source, p.origin});
  TranslationTable rev = train_model1(swapped, iterations, jobs);
  std::vector<AlignmentMatrix> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    AlignmentMatrix f = viterbi_align(pairs[i], fwd);
    AlignmentMatrix r = transpose(viterbi_align(swapped[i], rev));
    out[i] = grow_diag_final_and(f, r);
  }
  return out;
}

// The pipeline's phrase stage: extraction over given alignments plus
// Good-Turing scoring with lexical weights.
PhraseTable build_phrase_table(const std::vector<SentencePair>& pairs,
                               const std::vector<AlignmentMatrix>& alignments,
                               int em_iterations, std::size_t max_len,
                               int jobs) {
  if (pairs.size() != alignments.size())
    throw std::invalid_argument("pairs and alignments differ in length");
  std::vector<ExtractedPhrase> extracted;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto ph = extract_phrases(pairs[i], alignments[i], max_len);
    extracted.insert(extracted.end(), ph.begin(), ph.end());
  }
  std::vector<SentencePair> swapped;
  swapped.reserve(pairs.size());
  for (const SentencePair& p : pairs)
    swapped.push_back({p.target, p.source, p.origin});
  TranslationTable fwd = train_model1(pairs, em_iterations, jobs);
  TranslationTable rev = train_model1(swapped, em_iterations, jobs);
  return score_phrases(extracted, fwd, rev);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phrase-based translation toolkit with lexicon augmentation";
  m.attr("__version__") = "0.1.0";

  // ----- corpus / text preparation
  py::class_<SentencePair>(m, "SentencePair")
      .def(py::init([](Tokens source, Tokens target, const std::string& origin) {
             return SentencePair{std::move(source), std::move(target),
                                 origin_from_string(origin)};
           }),
           py::arg("source"), py::arg("target"), py::arg("origin") = "corpus")
      .def_readwrite("source", &SentencePair::source)
      .def_readwrite("target", &SentencePair::target)
      .def_property(
          "origin",
          [](const SentencePair& p) { return origin_to_string(p.origin); },
          [](SentencePair& p, const std::string& s) {
            p.origin = origin_from_string(s);
          })
      .def("__repr__", [](const SentencePair& p) {
        return "SentencePair(" + join(p.source) + " ||| " + join(p.target) + ")";
      });

  m.def("tokenize",
        [](const std::string& line, const std::string& lang) {
          return tokenize(line, lang);
        },
        py::arg("line"), py::arg("lang") = "",
        "Split a line into tokens (punctuation separated, combining marks kept)");
  m.def("clean",
        [](const std::vector<SentencePair>& pairs, std::size_t max_len,
           double max_ratio) { return clean(pairs, max_len, max_ratio); },
        py::arg("pairs"), py::arg("max_len") = 80, py::arg("max_ratio") = 9.0,
        "Drop empty, over-long, and length-ratio-violating pairs");
  m.def("read_parallel", &read_parallel, py::arg("source_path"),
        py::arg("target_path"), "Read and tokenize an aligned file pair");
  m.def("write_parallel", &write_parallel, py::arg("source_path"),
        py::arg("target_path"), py::arg("pairs"));

  // ----- lexicon lists and morphological augmentation
  py::class_<LexiconEntry>(m, "LexiconEntry")
      .def(py::init([](Tokens source_term, Tokens target_term,
                       const std::string& kind, bool common_singular_noun,
                       const std::string& article_override) {
             LexiconEntry e;
             e.source_term = std::move(source_term);
             e.target_term = std::move(target_term);
             e.kind = list_kind_from_string(kind);
             e.common_singular_noun = common_singular_noun;
             e.article_override = article_override;
             return e;
           }),
           py::arg("source_term"), py::arg("target_term"),
           py::arg("kind") = "dictionary",
           py::arg("common_singular_noun") = false,
           py::arg("article_override") = "")
      .def_readwrite("source_term", &LexiconEntry::source_term)
      .def_readwrite("target_term", &LexiconEntry::target_term)
      .def_property(
          "kind", [](const LexiconEntry& e) { return to_string(e.kind); },
          [](LexiconEntry& e, const std::string& s) {
            e.kind = list_kind_from_string(s);
          })
      .def_readwrite("common_singular_noun", &LexiconEntry::common_singular_noun)
      .def_readwrite("article_override", &LexiconEntry::article_override)
      .def_property_readonly(
          "origin",
          [](const LexiconEntry& e) { return origin_to_string(e.origin); })
      .def("source_surface", &LexiconEntry::source_surface)
      .def("target_surface", &LexiconEntry::target_surface)
      .def("__repr__", [](const LexiconEntry& e) {
        return "LexiconEntry(" + e.source_surface() + " -> " +
               e.target_surface() + ")";
      });

  m.def("load_lexicon", &load_lexicon, py::arg("path"));
  m.def("save_lexicon", &save_lexicon, py::arg("path"), py::arg("entries"));

  py::class_<InflectionParadigm>(m, "InflectionParadigm")
      .def_readonly("id", &InflectionParadigm::id)
      .def_readonly("match_suffix", &InflectionParadigm::match_suffix)
      .def_property_readonly(
          "cells",
          [](const InflectionParadigm& p) { return p.rules.size(); })
      .def("__repr__", [](const InflectionParadigm& p) {
        return "InflectionParadigm(" + p.id + ", " +
               std::to_string(p.rules.size()) + " cells)";
      });

  m.def("load_paradigms", &load_paradigms, py::arg("path"));
  m.def("select_paradigm",
        [](const LexiconEntry& entry,
           const std::vector<InflectionParadigm>& paradigms)
            -> std::optional<InflectionParadigm> {
          const InflectionParadigm* p = select_paradigm(entry, paradigms);
          if (!p) return std::nullopt;
          return *p;
        },
        py::arg("entry"), py::arg("paradigms"));
  m.def("augment_entry",
        [](const LexiconEntry& entry, const InflectionParadigm& paradigm) {
          return augment_entry(entry, paradigm);
        },
        py::arg("entry"), py::arg("paradigm"),
        "Generate every paradigm cell for one seed entry");
  m.def("augment_glossary",
        [](const LexiconEntry& entry,
           const std::vector<InflectionParadigm>& paradigms) {
          return augment_glossary(entry, paradigms);
        },
        py::arg("entry"), py::arg("paradigms"));
  m.def("augment_lexicon",
        [](const std::vector<LexiconEntry>& entries,
           const std::vector<InflectionParadigm>& paradigms) {
          auto [out, report] = augment_lexicon(entries, paradigms);
          return py::make_tuple(out, report.summary());
        },
        py::arg("entries"), py::arg("paradigms"),
        "Union of the input and every generated entry, plus a report line");
  m.def("filter_list",
        [](const std::vector<LexiconEntry>& entries,
           const std::vector<SentencePair>& train, const std::string& mode) {
          auto [kept, report] = filter_list(entries, train,
                                            filter_mode_from_string(mode));
          std::vector<py::tuple> rows;
          rows.reserve(report.rows.size());
          for (const FilterRow& r : report.rows)
            rows.push_back(py::make_tuple(r.entry, r.kept, r.reason));
          return py::make_tuple(kept, rows);
        },
        py::arg("entries"), py::arg("train"), py::arg("mode") = "token",
        "Drop entries already covered by the training corpus");
  m.def("integrate", &integrate, py::arg("train"), py::arg("lists"),
        "Append list entries to the corpus as one pair each");

  // ----- alignment
  py::class_<AlignmentMatrix>(m, "AlignmentMatrix")
      .def_readonly("src_len", &AlignmentMatrix::src_len)
      .def_readonly("tgt_len", &AlignmentMatrix::tgt_len)
      .def_property_readonly(
          "links",
          [](const AlignmentMatrix& a) {
            std::vector<std::pair<std::size_t, std::size_t>> v(a.links.begin(),
                                                               a.links.end());
            return v;
          })
      .def("__str__", [](const AlignmentMatrix& a) { return format_alignment(a); });

  py::class_<TranslationTable>(m, "TranslationTable")
      .def("prob", &TranslationTable::prob, py::arg("f"), py::arg("e"),
           "t(f|e): source token given target token");

  m.def("train_model1",
        [](const std::vector<SentencePair>& pairs, int iterations, int jobs) {
          return train_model1(pairs, iterations, jobs);
        },
        py::arg("pairs"), py::arg("iterations") = 10, py::arg("jobs") = 1);
  m.def("viterbi_align", &viterbi_align, py::arg("pair"), py::arg("table"));
  m.def("grow_diag_final_and", &grow_diag_final_and, py::arg("fwd"),
        py::arg("rev"));
  m.def("align_corpus", &align_corpus, py::arg("pairs"),
        py::arg("iterations") = 10, py::arg("jobs") = 1,
        "EM both directions, argmax alignments, grow-diag-final-and");

  // ----- phrase table
  py::class_<PhraseTable>(m, "PhraseTable")
      .def(py::init<>())
      .def("lookup",
           [](const PhraseTable& t, const std::string& src) {
             std::vector<py::tuple> out;
             if (const auto* es = t.lookup(src))
               for (const PhraseEntry& e : *es)
                 out.push_back(py::make_tuple(
                     join(e.tgt), e.phi_tgt_given_src, e.phi_src_given_tgt,
                     e.lex_tgt_given_src, e.lex_src_given_tgt, e.joint));
             return out;
           },
           py::arg("src"),
           "Entries for a source phrase: (target, fwd, rev, lex_fwd, lex_rev, count)")
      .def("source_vocabulary", &PhraseTable::source_vocabulary)
      .def_property_readonly("size", [](const PhraseTable& t) {
        std::size_t n = 0;
        for (const auto& [src, es] : t.entries) n += es.size();
        return n;
      });

  m.def("build_phrase_table", &build_phrase_table, py::arg("pairs"),
        py::arg("alignments"), py::arg("em_iterations") = 10,
        py::arg("max_len") = 7, py::arg("jobs") = 1,
        "Extract consistent phrases and score them (Good-Turing + lexical weights)");
  m.def("save_phrase_table",
        [](const PhraseTable& t, const std::string& path) {
          save_phrase_table(t, path);
        },
        py::arg("table"), py::arg("path"));
  m.def("load_phrase_table",
        [](const std::string& path) { return load_phrase_table(path); },
        py::arg("path"));

  // ----- language model
  py::class_<NGramModel>(m, "NGramModel")
      .def_readonly("order", &NGramModel::order)
      .def("cond_logp", &NGramModel::cond_logp, py::arg("context"),
           py::arg("word"))
      .def("score_sequence", &NGramModel::score_sequence, py::arg("tokens"),
           "log10 probability of the sequence wrapped in <s> ... </s>");

  m.def("train_lm",
        [](const std::vector<Tokens>& corpus, int order) {
          return train_lm(corpus, order);
        },
        py::arg("corpus"), py::arg("order") = 3,
        "Katz backoff model with Good-Turing discounting");
  m.def("save_arpa",
        [](const NGramModel& model, const std::string& path) {
          save_arpa(model, path);
        },
        py::arg("model"), py::arg("path"));
  m.def("load_arpa", [](const std::string& path) { return load_arpa(path); },
        py::arg("path"));

  // ----- decoding
  py::class_<FeatureWeights>(m, "FeatureWeights")
      .def(py::init<>())
      .def_readwrite("phrase_fwd", &FeatureWeights::phrase_fwd)
      .def_readwrite("phrase_rev", &FeatureWeights::phrase_rev)
      .def_readwrite("lex_fwd", &FeatureWeights::lex_fwd)
      .def_readwrite("lex_rev", &FeatureWeights::lex_rev)
      .def_readwrite("lm", &FeatureWeights::lm)
      .def_readwrite("distortion", &FeatureWeights::distortion)
      .def_readwrite("word_penalty", &FeatureWeights::word_penalty)
      .def_readwrite("phrase_penalty", &FeatureWeights::phrase_penalty)
      .def("as_dict", [](const FeatureWeights& w) {
        py::dict d;
        const auto& names = FeatureWeights::names();
        FeatureVector v = w.as_array();
        for (std::size_t i = 0; i < kNumFeatures; ++i)
          d[py::str(names[i])] = v[i];
        return d;
      });

  m.def("save_weights",
        [](const FeatureWeights& w, const std::string& path) {
          save_weights(w, path);
        },
        py::arg("weights"), py::arg("path"));
  m.def("load_weights",
        [](const std::string& path) { return load_weights(path); },
        py::arg("path"));

  py::class_<DecoderParams>(m, "DecoderParams")
      .def(py::init([](int stack_size, int distortion_limit) {
             DecoderParams p;
             p.stack_size = stack_size;
             p.distortion_limit = distortion_limit;
             return p;
           }),
           py::arg("stack_size") = 100, py::arg("distortion_limit") = 6)
      .def_readwrite("stack_size", &DecoderParams::stack_size)
      .def_readwrite("distortion_limit", &DecoderParams::distortion_limit);

  py::class_<Derivation>(m, "Derivation")
      .def_readonly("target", &Derivation::target)
      .def_readonly("features", &Derivation::features)
      .def_readonly("total", &Derivation::total)
      .def_readonly("oov_flags", &Derivation::oov_flags)
      .def("oov_passthrough_count", &Derivation::oov_passthrough_count)
      .def("__repr__", [](const Derivation& d) {
        std::ostringstream os;
        os << "Derivation(" << join(d.target) << ", total=" << d.total << ")";
        return os.str();
      });

  m.def("decode",
        [](const Tokens& source, const PhraseTable& table, const NGramModel& lm,
           const FeatureWeights& weights, const DecoderParams& params) {
          return decode(source, table, lm, weights, params);
        },
        py::arg("source"), py::arg("table"), py::arg("lm"),
        py::arg("weights") = FeatureWeights{},
        py::arg("params") = DecoderParams{},
        "Beam-stack search; uncovered tokens pass through (OOV ones flagged)");
  m.def("nbest",
        [](const Tokens& source, const PhraseTable& table, const NGramModel& lm,
           const FeatureWeights& weights, int n, const DecoderParams& params) {
          return nbest(source, table, lm, weights, n, params);
        },
        py::arg("source"), py::arg("table"), py::arg("lm"),
        py::arg("weights"), py::arg("n"), py::arg("params") = DecoderParams{});

  // ----- evaluation
  py::class_<BleuResult>(m, "BleuResult")
      .def_readonly("score", &BleuResult::score)
      .def_readonly("precisions", &BleuResult::precisions)
      .def_readonly("brevity_penalty", &BleuResult::brevity_penalty)
      .def_readonly("candidate_length", &BleuResult::candidate_length)
      .def_readonly("reference_length", &BleuResult::reference_length)
      .def("__repr__", [](const BleuResult& b) {
        std::ostringstream os;
        os << "BleuResult(score=" << b.score << ")";
        return os.str();
      });

  m.def("bleu",
        [](const std::vector<Tokens>& candidates,
           const std::vector<Tokens>& references, int max_n,
           bool smooth_plus_one) {
          return bleu(candidates, references, max_n, smooth_plus_one);
        },
        py::arg("candidates"), py::arg("references"), py::arg("max_n") = 4,
        py::arg("smooth_plus_one") = false,
        "Corpus BLEU, single reference, unsmoothed by default");
  m.def("oov_count",
        [](const std::vector<Tokens>& test_source, const PhraseTable& table,
           const std::string& mode) {
          return oov_count(test_source, table,
                           mode == "types" ? OovMode::types : OovMode::tokens);
        },
        py::arg("test_source"), py::arg("table"), py::arg("mode") = "tokens");

  // ----- tuning
  m.def("mert",
        [](const std::vector<SentencePair>& dev, const FeatureWeights& initial,
           const PhraseTable& table, const NGramModel& lm, int nbest_size,
           int max_iterations, int random_restarts, std::uint64_t seed,
           int jobs, const DecoderParams& decoder) {
          MertParams p;
          p.nbest_size = nbest_size;
          p.max_iterations = max_iterations;
          p.random_restarts = random_restarts;
          p.seed = seed;
          p.jobs = jobs;
          p.decoder = decoder;
          MertResult r = mert(dev, initial, table, lm, p);
          std::vector<py::tuple> iters;
          for (const MertIteration& it : r.iterations)
            iters.push_back(
                py::make_tuple(it.pool_size, it.bleu_before, it.bleu_after));
          return py::make_tuple(r.weights, iters);
        },
        py::arg("dev"), py::arg("initial") = FeatureWeights{},
        py::arg("table"), py::arg("lm"), py::arg("nbest_size") = 100,
        py::arg("max_iterations") = 10, py::arg("random_restarts") = 8,
        py::arg("seed") = 1, py::arg("jobs") = 1,
        py::arg("decoder") = DecoderParams{},
        "Minimum error rate training; returns (weights, iteration stats)");

  // ----- pipeline
  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("bleu", &PipelineResult::bleu)
      .def_readonly("oov_tokens", &PipelineResult::oov_tokens)
      .def_readonly("oov_types", &PipelineResult::oov_types)
      .def_readonly("passthrough_tokens", &PipelineResult::passthrough_tokens)
      .def_property_readonly(
          "report_path",
          [](const PipelineResult& r) { return r.report_path.string(); })
      .def("__repr__", [](const PipelineResult& r) {
        std::ostringstream os;
        os << "PipelineResult(bleu=" << r.bleu << ", oov_tokens=" << r.oov_tokens
           << ")";
        return os.str();
      });

  m.def("run_pipeline",
        [](const std::string& config_path, const std::string& out_dir,
           int jobs) { return run_pipeline(config_path, out_dir, jobs); },
        py::arg("config_path"), py::arg("out_dir"), py::arg("jobs") = 1,
        "Full train-tune-decode-evaluate run; writes stage artifacts under out_dir");
}
