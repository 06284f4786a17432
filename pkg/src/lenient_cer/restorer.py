"""Kanji restoration for kana tokens.

A request is a kana token with its left and right sentence context. The
bundled baseline proposes the token itself plus every dictionary surface
whose reading is exactly the token, and ranks them with a character n-gram
model. An external command speaking the tagged line protocol can replace
the baseline.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Protocol, TextIO

from lenient_cer.errors import EmptyCorpus, MalformedLine, ResourceError
from lenient_cer.kana import ReadingDictionary

OPEN_TAG = "<to_kanji>"
CLOSE_TAG = "</to_kanji>"

BOS = "<s>"
EOS = "</s>"
ADD_K = 0.1
DEFAULT_ORDER = 3
DEFAULT_MAX_CANDIDATES = 4
DEFAULT_MARGIN = 2.0


@dataclass(frozen=True)
class RestorationRequest:
    before: str
    token: str
    after: str


@dataclass(frozen=True)
class Candidate:
    surface: str
    score: float

    def __post_init__(self):
        if not self.surface:
            raise ValueError("candidate surface is empty")
        if not math.isfinite(self.score):
            raise ValueError(f"candidate score must be finite: {self.score}")


def serialize_tagged(req: RestorationRequest) -> str:
    """Wire form sent to restoration models: the token wrapped in <to_kanji> tags."""
    return f"{req.before}{OPEN_TAG}{req.token}{CLOSE_TAG}{req.after}"


class NgramModel:
    """Character n-gram counts with add-0.1 smoothing.

    Only the highest-order grams are stored; history counts are their
    marginals. Each line is padded with ``order - 1`` start symbols and one
    end symbol.
    """

    def __init__(self, order: int, counts: dict[tuple[str, ...], int]):
        if order < 1:
            raise ValueError("order must be >= 1")
        for gram, c in counts.items():
            if len(gram) != order:
                raise ValueError(f"gram {gram!r} does not have order {order}")
            if c < 1:
                raise ValueError(f"count for {gram!r} must be positive")
        self.order = order
        self.counts = dict(counts)
        self.total = sum(self.counts.values())
        self._history: Counter = Counter()
        vocab = set()
        for gram, c in self.counts.items():
            self._history[gram[:-1]] += c
            vocab.add(gram[-1])
        # One extra slot for symbols never seen in training.
        self.vocab_size = len(vocab) + 1

    def logprob(self, history: tuple[str, ...], symbol: str) -> float:
        num = self.counts.get(history + (symbol,), 0) + ADD_K
        den = self._history.get(history, 0) + ADD_K * self.vocab_size
        return math.log(num / den)

    def score_sequence(self, symbols: list[str], start: int, stop: int) -> float:
        """Negative log probability of ``symbols[start:stop]`` given their histories."""
        h = self.order - 1
        total = 0.0
        for t in range(start, stop):
            total -= self.logprob(tuple(symbols[t - h : t]), symbols[t])
        return total

    def score_in_context(self, before: str, surface: str, after: str) -> float:
        """Score of the grams overlapping ``surface`` when placed between the contexts."""
        h = self.order - 1
        head = list(before[max(0, len(before) - h) :]) if h else []
        head = [BOS] * (h - len(head)) + head
        tail = list(after[:h])
        if len(after) < h:
            tail.append(EOS)
        symbols = head + list(surface) + tail
        return self.score_sequence(symbols, h, len(symbols))

    def write(self, stream: TextIO) -> None:
        stream.write(f"#order\t{self.order}\n")
        for gram in sorted(self.counts):
            stream.write(f"{_gram_to_text(gram)}\t{self.counts[gram]}\n")

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as f:
            self.write(f)

    @classmethod
    def read(cls, stream: Iterable[str]) -> NgramModel:
        order = None
        counts: dict[tuple[str, ...], int] = {}
        for lineno, line in enumerate(stream, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if line.startswith("#order\t"):
                order = int(fields[1])
                continue
            if line.startswith("#"):
                continue
            if len(fields) != 2:
                raise MalformedLine("expected gram<TAB>count", lineno)
            gram = _gram_from_text(fields[0])
            try:
                counts[gram] = counts.get(gram, 0) + int(fields[1])
            except ValueError:
                raise MalformedLine(f"bad count {fields[1]!r}", lineno) from None
        if order is None:
            if not counts:
                raise ResourceError("n-gram model file is empty")
            order = len(next(iter(counts)))
        return cls(order, counts)

    @classmethod
    def load(cls, path: str | os.PathLike) -> NgramModel:
        with open(path, encoding="utf-8") as f:
            return cls.read(f)


_ESCAPES = {" ": "<sp>", "\t": "<tab>"}
_UNESCAPES = {v: k for k, v in _ESCAPES.items()}


def _gram_to_text(gram: tuple[str, ...]) -> str:
    return " ".join(_ESCAPES.get(s, s) for s in gram)


def _gram_from_text(text: str) -> tuple[str, ...]:
    return tuple(_UNESCAPES.get(s, s) for s in text.split(" "))


def pad_line(line: str, order: int) -> list[str]:
    return [BOS] * (order - 1) + list(line) + [EOS]


def train_ngram(corpus: Iterable[str], order: int = DEFAULT_ORDER) -> NgramModel:
    """Count character n-grams of ``order`` over non-blank corpus lines."""
    if order < 1:
        raise ValueError("order must be >= 1")
    counts: Counter = Counter()
    seen = False
    for line in corpus:
        line = line.strip()
        if not line:
            continue
        seen = True
        symbols = pad_line(line, order)
        for t in range(order - 1, len(symbols)):
            counts[tuple(symbols[t - order + 1 : t + 1])] += 1
    if not seen:
        raise EmptyCorpus("no non-blank lines in training corpus")
    return NgramModel(order, dict(counts))


def _select(scored: list[Candidate], max_candidates: int, margin: float) -> list[Candidate]:
    if max_candidates < 1:
        raise ValueError("max_candidates must be >= 1")
    if margin < 0:
        raise ValueError("margin must be >= 0")
    if not scored:
        return []
    best = min(c.score for c in scored)
    kept = sorted((c for c in scored if c.score <= best + margin), key=lambda c: (c.score, c.surface))
    return kept[:max_candidates]


def restore(
    req: RestorationRequest,
    dictionary: ReadingDictionary,
    model: NgramModel,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    margin: float = DEFAULT_MARGIN,
) -> list[Candidate]:
    """Rank the token and its same-reading dictionary surfaces in context.

    Returns candidates within ``margin`` nats of the best, at most
    ``max_candidates`` of them, ordered by (score, surface).
    """
    surfaces = [req.token]
    surfaces += [s for s in dictionary.surfaces_for_reading(req.token) if s != req.token]
    scored = [Candidate(s, model.score_in_context(req.before, s, req.after)) for s in surfaces]
    return _select(scored, max_candidates, margin)


class Restorer(Protocol):
    def propose(self, req: RestorationRequest, max_candidates: int, margin: float) -> list[Candidate]: ...


class NgramRestorer:
    """The n-gram baseline with a per-instance cache keyed on the scoring window."""

    def __init__(self, dictionary: ReadingDictionary, model: NgramModel):
        self.dictionary = dictionary
        self.model = model
        self._cache: dict = {}

    def propose(
        self,
        req: RestorationRequest,
        max_candidates: int = DEFAULT_MAX_CANDIDATES,
        margin: float = DEFAULT_MARGIN,
    ) -> list[Candidate]:
        h = self.model.order - 1
        # Context beyond h characters on either side cannot change scores.
        key = (
            req.before[max(0, len(req.before) - h) :] if h else "",
            req.token,
            req.after[:h],
            max_candidates,
            margin,
        )
        hit = self._cache.get(key)
        if hit is None:
            hit = restore(req, self.dictionary, self.model, max_candidates, margin)
            self._cache[key] = hit
        return list(hit)

    def __getstate__(self):
        return {"dictionary": self.dictionary, "model": self.model}

    def __setstate__(self, state):
        self.__init__(state["dictionary"], state["model"])


class ExternalRestorer:
    """Restorer backed by a long-running external command.

    Protocol (UTF-8): one tagged request per line on the command's standard
    input; the command answers with ``surface<TAB>score`` lines followed by
    a blank line. Lower scores are better.
    """

    def __init__(self, command: str | list[str]):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc: subprocess.Popen | None = None

    def _process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    bufsize=1,
                )
            except OSError as e:
                raise ResourceError(f"cannot start restorer command {self.command!r}: {e}") from e
        return self._proc

    def propose(
        self,
        req: RestorationRequest,
        max_candidates: int = DEFAULT_MAX_CANDIDATES,
        margin: float = DEFAULT_MARGIN,
    ) -> list[Candidate]:
        proc = self._process()
        proc.stdin.write(serialize_tagged(req) + "\n")
        proc.stdin.flush()
        scored = []
        while True:
            line = proc.stdout.readline()
            if not line:
                raise ResourceError("restorer command closed its output mid-response")
            line = line.rstrip("\r\n")
            if not line:
                break
            surface, sep, score = line.partition("\t")
            try:
                scored.append(Candidate(surface, float(score)))
            except ValueError:
                raise ResourceError(f"bad restorer response line: {line!r}") from None
        return _select(scored, max_candidates, margin)

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
            if self._proc.stdout:
                self._proc.stdout.close()
            self._proc = None

    def __getstate__(self):
        return {"command": self.command}

    def __setstate__(self, state):
        self.command = state["command"]
        self._proc = None
