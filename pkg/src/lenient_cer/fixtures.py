"""Bundled toy resources: reading dictionary, variant lexicon, n-gram corpus, mini corpus."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources as _res

from lenient_cer.builder import Resources
from lenient_cer.evaluate import UtteranceRecord, read_corpus
from lenient_cer.kana import ReadingDictionary
from lenient_cer.lexicon import VariantLexicon, load_lexicon
from lenient_cer.restorer import NgramModel, NgramRestorer, train_ngram


def data_path(name: str):
    return _res.files("lenient_cer") / "data" / name


def read_text(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def readings() -> ReadingDictionary:
    return ReadingDictionary.from_text(read_text("readings.tsv"))


@lru_cache(maxsize=None)
def lexicon() -> VariantLexicon:
    import io

    return load_lexicon(io.StringIO(read_text("lexicon.tsv")))


def toy_corpus() -> list[str]:
    return read_text("toy_corpus.txt").splitlines()


@lru_cache(maxsize=None)
def ngram_model(order: int = 3) -> NgramModel:
    return train_ngram(toy_corpus(), order)


def mini_corpus() -> list[UtteranceRecord]:
    import io

    return read_corpus(io.StringIO(read_text("mini_corpus.tsv")))


def resources() -> Resources:
    """Fresh Resources bundle built from the fixture files."""
    return Resources(
        readings=readings(),
        lexicon=lexicon(),
        restorer=NgramRestorer(readings(), ngram_model()),
    )
