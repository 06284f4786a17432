"""Lenient character error rate for Japanese ASR.

A reference transcription is expanded into a lattice of valid respellings
(kana, katakana, restored kanji, curated variant classes) and the hypothesis
is scored against the closest lattice path.
"""

from lenient_cer.errors import (
    CyclicLattice,
    DuplicateSpelling,
    EmptyCorpus,
    EmptyLattice,
    EmptyReference,
    LenientError,
    MalformedLine,
    NoValidRecords,
    NotConvertible,
)
from lenient_cer.semiring import LexWeight, TropicalWeight
from lenient_cer.lattice import Arc, Lattice, shortest_distance, shortest_path, trim, project_lm
from lenient_cer.editdist import EditResult, edit_distance, lenient_cer, levenshtein
from lenient_cer.kana import Token, ReadingDictionary, hira_to_kata, kata_to_hira, segment_and_read
from lenient_cer.restorer import (
    Candidate,
    NgramModel,
    NgramRestorer,
    RestorationRequest,
    restore,
    serialize_tagged,
    train_ngram,
)
from lenient_cer.lexicon import VariantLexicon, load_lexicon, variants_of
from lenient_cer.builder import (
    Resources,
    StageConfig,
    TokenVariants,
    assemble_lattice,
    build_reference_lattice,
    build_token_variants,
)
from lenient_cer.evaluate import (
    EvalReport,
    UtteranceRecord,
    UtteranceScore,
    corpus_evaluate,
    lenient_eval,
    naive_cer,
    naive_wer,
)

__version__ = "0.1.0"
