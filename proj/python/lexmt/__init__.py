"""Phrase-based statistical translation toolkit with rule-based lexicon
augmentation (Sinhala case markers) and corpus-based list filtration.

The heavy lifting lives in the compiled extension ``lexmt._core``; this
package re-exports its public surface.
"""

from lexmt._core import (  # noqa: F401
    AlignmentMatrix,
    BleuResult,
    DecoderParams,
    Derivation,
    FeatureWeights,
    InflectionParadigm,
    LexiconEntry,
    NGramModel,
    PhraseTable,
    PipelineResult,
    SentencePair,
    TranslationTable,
    __version__,
    align_corpus,
    augment_entry,
    augment_glossary,
    augment_lexicon,
    bleu,
    build_phrase_table,
    clean,
    decode,
    filter_list,
    grow_diag_final_and,
    integrate,
    load_arpa,
    load_lexicon,
    load_paradigms,
    load_phrase_table,
    load_weights,
    mert,
    nbest,
    oov_count,
    read_parallel,
    run_pipeline,
    save_arpa,
    save_lexicon,
    save_phrase_table,
    save_weights,
    select_paradigm,
    tokenize,
    train_lm,
    train_model1,
    viterbi_align,
    write_parallel,
)

__all__ = [name for name in dir() if not name.startswith("_")]
