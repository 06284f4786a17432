"""Staged construction of reference respelling lattices.

Stages, each adding spellings to every word slot:

* kana: the hiragana reading and its katakana form
* kanji: restored kanji spellings of each kana spelling
* lexicon: curated equivalence classes of every spelling collected so far

The result is a sausage: one parallel bundle of spellings per token.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Sequence

from lenient_cer.errors import EmptyReference, LenientError
from lenient_cer.kana import (
    ReadingDictionary,
    Token,
    hira_to_kata,
    is_hiragana,
    is_kana,
    is_katakana,
    kata_to_hira,
    segment_and_read,
)
from lenient_cer.lattice import Arc, Lattice
from lenient_cer.lexicon import VariantLexicon
from lenient_cer.restorer import (
    DEFAULT_MARGIN,
    DEFAULT_MAX_CANDIDATES,
    RestorationRequest,
    Restorer,
)
from lenient_cer.semiring import LexWeight

log = logging.getLogger(__name__)

ONE = LexWeight.one()

# Closed-class words (particles, copulas, demonstratives) are kept as written:
# a katakana or kanji respelling of は or この is not a plausible variant.
DEFAULT_FUNCTION_WORDS = frozenset(
    """
    は が を に で と も の へ や か な ね よ わ ぞ さ
    から まで より だけ など ほど しか ので のに けど けれど って
    です だ ます でした だった ました ません
    この その あの どの これ それ あれ どれ ここ そこ あそこ どこ
    """.split()
)


@dataclass(frozen=True)
class StageConfig:
    kana: bool = False
    kanji: bool = False
    lexicon: bool = False
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.kanji and not self.kana:
            raise ValueError("the kanji stage requires the kana stage")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")

    @property
    def name(self) -> str:
        enabled = [s for s in ("kana", "kanji", "lexicon") if getattr(self, s)]
        return "+".join(enabled) if enabled else "raw"

    @classmethod
    def from_names(cls, names: Sequence[str], **kwargs) -> StageConfig:
        names = [n.strip() for n in names if n.strip()]
        unknown = set(names) - {"kana", "kanji", "lexicon"}
        if unknown:
            raise ValueError(f"unknown stage(s): {', '.join(sorted(unknown))}")
        return cls(kana="kana" in names, kanji="kanji" in names, lexicon="lexicon" in names, **kwargs)

    def cumulative(self) -> list[StageConfig]:
        """raw, then each enabled stage added in kana, kanji, lexicon order."""
        configs = [replace(self, kana=False, kanji=False, lexicon=False)]
        for stage in ("kana", "kanji", "lexicon"):
            if getattr(self, stage):
                configs.append(replace(configs[-1], **{stage: True}))
        return configs


@dataclass
class Resources:
    readings: ReadingDictionary = field(default_factory=ReadingDictionary)
    lexicon: VariantLexicon | None = None
    restorer: Restorer | None = None
    function_words: frozenset[str] = DEFAULT_FUNCTION_WORDS


@dataclass(frozen=True)
class TokenVariants:
    token: Token
    spellings: tuple[str, ...]

    def __post_init__(self):
        if not self.spellings or self.spellings[0] != self.token.surface:
            raise ValueError("spellings must start with the token surface")
        if len(set(self.spellings)) != len(self.spellings):
            raise ValueError("duplicate spellings")


def _kana_spellings(token: Token) -> list[str]:
    out = []
    if is_hiragana(token.reading):
        out.append(token.reading)
        out.append(hira_to_kata(token.reading))
    if is_hiragana(token.surface):
        out.append(hira_to_kata(token.surface))
    elif is_katakana(token.surface):
        out.append(kata_to_hira(token.surface))
    return out


def build_token_variants(
    tokens: Sequence[Token],
    config: StageConfig,
    resources: Resources,
) -> list[TokenVariants]:
    """Collect the spellings of every token under ``config``.

    A failure inside one stage for one token only drops that stage's
    spellings for the token.
    """
    reference = "".join(t.surface for t in tokens)
    result = []
    for token in tokens:
        spellings = dict.fromkeys([token.surface])
        if not token.is_lexical:
            result.append(TokenVariants(token, tuple(spellings)))
            continue
        fixed = token.surface in resources.function_words

        if config.kana and not fixed and token.has_reading:
            try:
                spellings.update(dict.fromkeys(_kana_spellings(token)))
            except LenientError as e:
                log.warning("kana stage skipped for %r: %s", token.surface, e)

        if config.kanji and not fixed and resources.restorer is not None:
            before = reference[: token.span[0]]
            after = reference[token.span[1] :]
            for spelling in [s for s in spellings if is_kana(s)]:
                try:
                    candidates = resources.restorer.propose(
                        RestorationRequest(before, spelling, after),
                        config.max_candidates,
                        config.margin,
                    )
                except (LenientError, ValueError) as e:
                    log.warning("kanji stage skipped for %r: %s", spelling, e)
                    continue
                spellings.update(dict.fromkeys(c.surface for c in candidates))

        if config.lexicon and resources.lexicon is not None:
            for spelling in list(spellings):
                spellings.update(dict.fromkeys(resources.lexicon.ordered_variants(spelling)))

        result.append(TokenVariants(token, tuple(spellings)))
    return result


def assemble_lattice(variants: Sequence[TokenVariants]) -> Lattice:
    """Concatenate per-slot bundles; spellings in a slot share prefixes."""
    if not variants:
        raise ValueError("no token slots to assemble")
    arcs: list[list[Arc]] = [[]]
    entry = 0
    for slot in variants:
        exit_state = None
        pending: list[tuple[int, str]] = []
        trie: dict[tuple[int, str], int] = {}
        for spelling in slot.spellings:
            q = entry
            for ch in spelling[:-1]:
                nxt = trie.get((q, ch))
                if nxt is None:
                    arcs.append([])
                    nxt = len(arcs) - 1
                    trie[(q, ch)] = nxt
                    arcs[q].append(Arc(ch, ONE, nxt))
                q = nxt
            pending.append((q, spelling[-1]))
        arcs.append([])
        exit_state = len(arcs) - 1
        for q, ch in pending:
            arcs[q].append(Arc(ch, ONE, exit_state))
        entry = exit_state
    return Lattice(arcs, {entry: ONE})


def normalize(text: str, form: str = "NFC") -> str:
    return unicodedata.normalize(form, text)


def build_reference_lattice(
    reference: str,
    config: StageConfig,
    resources: Resources,
    form: str = "NFC",
) -> Lattice:
    variants = reference_variants(reference, config, resources, form)
    return assemble_lattice(variants)


def reference_variants(
    reference: str,
    config: StageConfig,
    resources: Resources,
    form: str = "NFC",
) -> list[TokenVariants]:
    reference = normalize(reference, form)
    if not reference:
        raise EmptyReference("reference is empty after normalization")
    tokens = segment_and_read(reference, resources.readings)
    return build_token_variants(tokens, config, resources)
