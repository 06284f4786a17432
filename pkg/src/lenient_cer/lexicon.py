"""Curated spelling equivalence classes ("safe" variants).

File format: UTF-8, one class per line, members separated by tabs, ``#``
comments. A spelling may belong to at most one class.
"""

from __future__ import annotations

import io
import os
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from lenient_cer.errors import DuplicateSpelling, MalformedLine, ResourceError


@dataclass(frozen=True)
class Rejection:
    lineno: int
    reason: str
    line: str


@dataclass
class VariantLexicon:
    classes: list[tuple[str, ...]] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)
    rejected: list[Rejection] = field(default_factory=list)

    def add_class(self, members: Iterable[str], lineno: int | None = None) -> None:
        members = tuple(unicodedata.normalize("NFC", m) for m in members)
        if any(not m for m in members):
            raise MalformedLine("empty spelling in class", lineno)
        if len(set(members)) != len(members):
            raise MalformedLine("spelling repeated within a class", lineno)
        if len(members) < 2:
            raise MalformedLine("a class needs at least two distinct spellings", lineno)
        for m in members:
            if m in self.index:
                other = self.index[m]
                raise DuplicateSpelling(f"{m!r} already belongs to class {other}", lineno)
        cid = len(self.classes)
        self.classes.append(members)
        for m in members:
            self.index[m] = cid

    def variants_of(self, spelling: str) -> set[str]:
        cid = self.index.get(spelling)
        if cid is None:
            return {spelling}
        return set(self.classes[cid])

    def ordered_variants(self, spelling: str) -> tuple[str, ...]:
        """Class members in file order, or just ``spelling`` if unindexed."""
        cid = self.index.get(spelling)
        return (spelling,) if cid is None else self.classes[cid]

    def __len__(self) -> int:
        return len(self.classes)

    def write(self, stream: TextIO) -> None:
        for members in self.classes:
            stream.write("\t".join(members) + "\n")

    def to_text(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def report(self) -> dict:
        return {
            "classes": len(self.classes),
            "spellings": len(self.index),
            "rejected": [{"line": r.lineno, "reason": r.reason, "text": r.line} for r in self.rejected],
        }


def load_lexicon(source: str | os.PathLike | TextIO, strict: bool = True) -> VariantLexicon:
    """Read a lexicon from a path or text stream.

    With ``strict`` the first bad line raises; otherwise bad lines are
    skipped and recorded in ``rejected``.
    """
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, encoding="utf-8") as f:
                return _read(f, strict)
        except OSError as e:
            raise ResourceError(f"cannot read lexicon {source}: {e}") from e
    return _read(source, strict)


def _read(stream: TextIO, strict: bool) -> VariantLexicon:
    lex = VariantLexicon()
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        members = [m.strip() for m in line.split("\t") if m.strip()]
        try:
            lex.add_class(members, lineno)
        except (MalformedLine, DuplicateSpelling) as e:
            if strict:
                raise
            lex.rejected.append(Rejection(lineno, type(e).__name__, line))
    return lex


def variants_of(lexicon: VariantLexicon, spelling: str) -> set[str]:
    return lexicon.variants_of(spelling)
