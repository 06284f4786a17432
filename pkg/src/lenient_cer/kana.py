"""Kana conversion, reading dictionary and greedy segmentation."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, TextIO

from lenient_cer.errors import MalformedLine, NotConvertible

CHOONPU = "ー"  # ー
_KANA_OFFSET = 0x60

# Hiragana U+3041..U+3096 plus the iteration marks ゝ ゞ; katakana is the same block shifted by 0x60.
_HIRA_CODES = frozenset(range(0x3041, 0x3097)) | {0x309D, 0x309E}
_KATA_CODES = frozenset(c + _KANA_OFFSET for c in _HIRA_CODES)
# ヷ ヸ ヹ ヺ have no hiragana counterpart.
_KATA_EXTRA = frozenset(range(0x30F7, 0x30FB))

_KANJI_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
    (0x30000, 0x3134F),
)
# 々 and 〆 behave as kanji inside words (人々, 〆切).
_KANJI_MARKS = frozenset({0x3005, 0x3006})


def is_hiragana_char(ch: str) -> bool:
    return ord(ch) in _HIRA_CODES


def is_katakana_char(ch: str) -> bool:
    c = ord(ch)
    return c in _KATA_CODES or c in _KATA_EXTRA


def is_kanji_char(ch: str) -> bool:
    c = ord(ch)
    if c in _KANJI_MARKS:
        return True
    return any(lo <= c <= hi for lo, hi in _KANJI_RANGES)


def is_lexical_char(ch: str) -> bool:
    return ch == CHOONPU or is_hiragana_char(ch) or is_katakana_char(ch) or is_kanji_char(ch)


def is_hiragana(s: str) -> bool:
    """True if every scalar is hiragana or ー (the empty string qualifies)."""
    return all(ch == CHOONPU or ord(ch) in _HIRA_CODES for ch in s)


def is_katakana(s: str) -> bool:
    return all(ch == CHOONPU or ord(ch) in _KATA_CODES for ch in s)


def is_kana(s: str) -> bool:
    return bool(s) and all(ch == CHOONPU or is_hiragana_char(ch) or is_katakana_char(ch) for ch in s)


def has_kanji(s: str) -> bool:
    return any(is_kanji_char(ch) for ch in s)


def hira_to_kata(s: str) -> str:
    out = []
    for ch in s:
        if ch == CHOONPU:
            out.append(ch)
        elif ord(ch) in _HIRA_CODES:
            out.append(chr(ord(ch) + _KANA_OFFSET))
        else:
            raise NotConvertible(f"not hiragana: {ch!r} (U+{ord(ch):04X})")
    return "".join(out)


def kata_to_hira(s: str) -> str:
    out = []
    for ch in s:
        if ch == CHOONPU:
            out.append(ch)
        elif ord(ch) in _KATA_CODES:
            out.append(chr(ord(ch) - _KANA_OFFSET))
        else:
            raise NotConvertible(f"no hiragana counterpart: {ch!r} (U+{ord(ch):04X})")
    return "".join(out)


def to_hiragana(s: str) -> str:
    """Map the katakana scalars of a kana string to hiragana, leaving hiragana alone."""
    return "".join(ch if ch == CHOONPU or ord(ch) in _HIRA_CODES else kata_to_hira(ch) for ch in s)


@dataclass(frozen=True)
class Token:
    surface: str
    reading: str
    span: tuple[int, int]
    is_lexical: bool = True
    # False when no reading could be found; reading then equals surface.
    has_reading: bool = True

    @property
    def is_kana(self) -> bool:
        return is_kana(self.surface)


class ReadingDictionary:
    """Surface to (reading, frequency) entries, in file order.

    File format: UTF-8, ``surface<TAB>reading<TAB>frequency`` per line,
    ``#`` comments. A surface may appear on several lines.
    """

    def __init__(self, entries: Iterable[tuple[str, str, int]] = ()):
        self._entries: dict[str, list[tuple[str, int]]] = {}
        self._by_reading: dict[str, list[str]] = {}
        for surface, reading, freq in entries:
            self._add(surface, reading, freq)
        self.max_len = max((len(s) for s in self._entries), default=0)

    def _add(self, surface: str, reading: str, freq: int, lineno: int | None = None) -> None:
        if not surface:
            raise MalformedLine("empty surface", lineno)
        if not reading or not is_hiragana(reading):
            raise MalformedLine(f"reading must be hiragana: {reading!r}", lineno)
        if freq < 1:
            raise MalformedLine(f"frequency must be positive: {freq}", lineno)
        self._entries.setdefault(surface, []).append((reading, freq))
        surfaces = self._by_reading.setdefault(reading, [])
        if surface not in surfaces:
            surfaces.append(surface)

    @classmethod
    def read(cls, stream: TextIO) -> ReadingDictionary:
        d = cls()
        for lineno, line in enumerate(stream, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise MalformedLine("expected surface<TAB>reading<TAB>frequency", lineno)
            try:
                freq = int(fields[2])
            except ValueError:
                raise MalformedLine(f"bad frequency {fields[2]!r}", lineno) from None
            d._add(fields[0], fields[1], freq, lineno)
        d.max_len = max((len(s) for s in d._entries), default=0)
        return d

    @classmethod
    def load(cls, path: str | os.PathLike) -> ReadingDictionary:
        with open(path, encoding="utf-8") as f:
            return cls.read(f)

    @classmethod
    def from_text(cls, text: str) -> ReadingDictionary:
        return cls.read(io.StringIO(text))

    def __contains__(self, surface: str) -> bool:
        return surface in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def readings(self, surface: str) -> list[tuple[str, int]]:
        return list(self._entries.get(surface, ()))

    def best_reading(self, surface: str) -> str | None:
        """Highest-frequency reading; the earliest entry wins ties."""
        best = None
        for reading, freq in self._entries.get(surface, ()):
            if best is None or freq > best[1]:
                best = (reading, freq)
        return best[0] if best else None

    def total_frequency(self, surface: str) -> int:
        return sum(f for _, f in self._entries.get(surface, ()))

    def surfaces_for_reading(self, reading: str) -> tuple[str, ...]:
        return tuple(self._by_reading.get(reading, ()))


def _read_token(surface: str, span: tuple[int, int], dictionary: ReadingDictionary) -> Token:
    lexical = any(is_lexical_char(ch) for ch in surface)
    if not lexical:
        return Token(surface, surface, span, is_lexical=False, has_reading=False)
    if is_kana(surface):
        try:
            return Token(surface, to_hiragana(surface), span)
        except NotConvertible:
            return Token(surface, surface, span, has_reading=False)
    reading = dictionary.best_reading(surface)
    if reading is None:
        return Token(surface, surface, span, has_reading=False)
    return Token(surface, reading, span)


def segment_and_read(reference: str, dictionary: ReadingDictionary) -> list[Token]:
    """Greedy longest-match segmentation with readings.

    Characters not covered by any dictionary surface become one-character
    tokens, except runs of punctuation/symbols/Latin, which are kept whole
    as non-lexical tokens.
    """
    tokens: list[Token] = []
    n = len(reference)
    i = 0
    while i < n:
        length = _longest_match(reference, i, dictionary)
        if length:
            end = i + length
        elif not is_lexical_char(reference[i]):
            end = i + 1
            while end < n and not is_lexical_char(reference[end]) and not _longest_match(reference, end, dictionary):
                end += 1
        else:
            end = i + 1
        tokens.append(_read_token(reference[i:end], (i, end), dictionary))
        i = end
    return tokens


def _longest_match(text: str, i: int, dictionary: ReadingDictionary) -> int:
    for length in range(min(dictionary.max_len, len(text) - i), 0, -1):
        if text[i : i + length] in dictionary:
            return length
    return 0
