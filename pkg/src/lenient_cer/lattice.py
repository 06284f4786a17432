"""Acyclic weighted character lattices.

A lattice is an acceptor whose arcs carry a single character (or epsilon,
written ``None``) and a :class:`LexWeight`. State 0 is the start state.
Lattices are immutable once built; every transformation returns a new one.
"""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from lenient_cer.errors import CyclicLattice, EmptyLattice
from lenient_cer.semiring import LexWeight, TropicalWeight

EPSILON_TEXT = "<eps>"
ONE = LexWeight.one()


@dataclass(frozen=True)
class Arc:
    label: str | None
    weight: LexWeight
    nextstate: int


class Lattice:
    """Immutable acyclic lattice.

    ``arcs[q]`` is the tuple of arcs leaving state ``q``; ``finals`` maps a
    final state to its final weight. Construction checks that arcs point to
    existing states and that the graph is acyclic.
    """

    __slots__ = ("_arcs", "_finals", "_order")

    def __init__(
        self,
        arcs: Sequence[Iterable[Arc]],
        finals: Mapping[int, LexWeight],
    ):
        self._arcs: tuple[tuple[Arc, ...], ...] = tuple(tuple(a) for a in arcs)
        n = len(self._arcs)
        for q, out in enumerate(self._arcs):
            for arc in out:
                if not 0 <= arc.nextstate < n:
                    raise ValueError(f"arc from {q} to missing state {arc.nextstate}")
                if arc.label is not None and len(arc.label) != 1:
                    raise ValueError(f"arc label must be one character: {arc.label!r}")
        for q in finals:
            if not 0 <= q < n:
                raise ValueError(f"final state {q} does not exist")
        self._finals: dict[int, LexWeight] = dict(sorted(finals.items()))
        self._order = _topological_order(self._arcs)

    @classmethod
    def from_string(cls, text: str, weight: LexWeight = ONE) -> Lattice:
        """Single-path lattice spelling ``text``."""
        arcs = [[Arc(ch, weight, i + 1)] for i, ch in enumerate(text)]
        arcs.append([])
        return cls(arcs, {len(text): ONE})

    @classmethod
    def from_strings(cls, texts: Iterable[str]) -> Lattice:
        """Union of single paths sharing only the start state."""
        arcs: list[list[Arc]] = [[]]
        finals: dict[int, LexWeight] = {}
        for text in texts:
            if not text:
                finals[0] = ONE
                continue
            prev = 0
            for i, ch in enumerate(text):
                arcs.append([])
                nxt = len(arcs) - 1
                arcs[prev].append(Arc(ch, ONE, nxt))
                prev = nxt
            finals[prev] = ONE
        return cls(arcs, finals)

    @property
    def start(self) -> int | None:
        return 0 if self._arcs else None

    @property
    def num_states(self) -> int:
        return len(self._arcs)

    @property
    def finals(self) -> Mapping[int, LexWeight]:
        return self._finals

    @property
    def topological_order(self) -> tuple[int, ...]:
        return self._order

    def arcs(self, state: int) -> tuple[Arc, ...]:
        return self._arcs[state]

    def final(self, state: int) -> LexWeight:
        return self._finals.get(state, LexWeight.zero())

    def num_arcs(self) -> int:
        return sum(len(out) for out in self._arcs)

    def has_epsilons(self) -> bool:
        return any(arc.label is None for out in self._arcs for arc in out)

    def paths(self) -> Iterator[tuple[str, LexWeight]]:
        """Enumerate every complete path as (labels, weight).

        Exponential in general; meant for small lattices and tests.
        """
        if not self._arcs:
            return
        stack: list[tuple[int, str, LexWeight]] = [(0, "", ONE)]
        while stack:
            q, labels, w = stack.pop()
            if q in self._finals:
                yield labels, w.times(self._finals[q])
            for arc in reversed(self._arcs[q]):
                stack.append((arc.nextstate, labels + (arc.label or ""), w.times(arc.weight)))

    def __repr__(self) -> str:
        return f"Lattice(states={self.num_states}, arcs={self.num_arcs()}, finals={len(self._finals)})"

    # Text format: "src\tdst\tlabel\tedit,lm" per arc, "state\tedit,lm" per final.

    def write(self, stream: TextIO) -> None:
        for q, out in enumerate(self._arcs):
            for arc in out:
                label = EPSILON_TEXT if arc.label is None else arc.label
                stream.write(f"{q}\t{arc.nextstate}\t{label}\t{arc.weight.to_text()}\n")
        for q, w in self._finals.items():
            stream.write(f"{q}\t{w.to_text()}\n")

    def to_text(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    @classmethod
    def read(cls, stream: Iterable[str]) -> Lattice:
        arcs: dict[int, list[Arc]] = {}
        finals: dict[int, LexWeight] = {}
        top = -1
        for lineno, line in enumerate(stream, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) == 4:
                src, dst = int(fields[0]), int(fields[1])
                label = None if fields[2] == EPSILON_TEXT else fields[2]
                arcs.setdefault(src, []).append(Arc(label, LexWeight.from_text(fields[3]), dst))
                top = max(top, src, dst)
            elif len(fields) == 2:
                q = int(fields[0])
                finals[q] = LexWeight.from_text(fields[1])
                top = max(top, q)
            else:
                raise ValueError(f"line {lineno}: expected 2 or 4 tab-separated fields")
        return cls([arcs.get(q, []) for q in range(top + 1)], finals)

    @classmethod
    def from_text(cls, text: str) -> Lattice:
        return cls.read(io.StringIO(text))


def _topological_order(arcs: Sequence[Sequence[Arc]]) -> tuple[int, ...]:
    indegree = [0] * len(arcs)
    for out in arcs:
        for arc in out:
            indegree[arc.nextstate] += 1
    queue = deque(q for q, d in enumerate(indegree) if d == 0)
    order = []
    while queue:
        q = queue.popleft()
        order.append(q)
        for arc in arcs[q]:
            indegree[arc.nextstate] -= 1
            if indegree[arc.nextstate] == 0:
                queue.append(arc.nextstate)
    if len(order) != len(arcs):
        raise CyclicLattice("lattice contains a cycle")
    return tuple(order)


def trim(lattice: Lattice) -> Lattice:
    """Drop states that are not on some start-to-final path.

    Surviving states keep their relative numbering, so the start stays 0.
    Returns a lattice with no states if there is no complete path.
    """
    n = lattice.num_states
    if n == 0:
        return lattice
    accessible = [False] * n
    accessible[0] = True
    for q in lattice.topological_order:
        if accessible[q]:
            for arc in lattice.arcs(q):
                accessible[arc.nextstate] = True
    coaccessible = [q in lattice.finals for q in range(n)]
    for q in reversed(lattice.topological_order):
        if not coaccessible[q]:
            coaccessible[q] = any(coaccessible[arc.nextstate] for arc in lattice.arcs(q))
    keep = [accessible[q] and coaccessible[q] for q in range(n)]
    if not keep[0]:
        return Lattice([], {})
    index = {}
    for q in range(n):
        if keep[q]:
            index[q] = len(index)
    arcs = [
        [Arc(a.label, a.weight, index[a.nextstate]) for a in lattice.arcs(q) if keep[a.nextstate]]
        for q in range(n)
        if keep[q]
    ]
    finals = {index[q]: w for q, w in lattice.finals.items() if keep[q]}
    return Lattice(arcs, finals)


def rmepsilon(lattice: Lattice) -> Lattice:
    """Remove epsilon arcs, folding their weights into the following arcs."""
    if not lattice.has_epsilons():
        return lattice
    n = lattice.num_states
    new_arcs: list[list[Arc]] = [[] for _ in range(n)]
    new_finals: dict[int, LexWeight] = {}
    for q in range(n):
        closure = _epsilon_closure(lattice, q)
        # (label, nextstate) pairs reached by several epsilon routes are combined with plus.
        merged: dict[tuple[str, int], LexWeight] = {}
        final = LexWeight.zero()
        for p, w in closure.items():
            if p in lattice.finals:
                final = final.plus(w.times(lattice.finals[p]))
            for arc in lattice.arcs(p):
                if arc.label is None:
                    continue
                key = (arc.label, arc.nextstate)
                cand = w.times(arc.weight)
                merged[key] = merged[key].plus(cand) if key in merged else cand
        new_arcs[q] = [Arc(label, w, nxt) for (label, nxt), w in merged.items()]
        if not final.is_zero():
            new_finals[q] = final
    return trim(Lattice(new_arcs, new_finals))


def _epsilon_closure(lattice: Lattice, state: int) -> dict[int, LexWeight]:
    dist = {state: ONE}
    # The epsilon subgraph is acyclic, so relaxing in global topological order is exact.
    for q in lattice.topological_order:
        if q not in dist:
            continue
        for arc in lattice.arcs(q):
            if arc.label is None:
                w = dist[q].times(arc.weight)
                old = dist.get(arc.nextstate)
                dist[arc.nextstate] = w if old is None else old.plus(w)
    return dist


def shortest_distance(lattice: Lattice) -> LexWeight:
    """Plus-sum over all complete paths of the path weight.

    Under the lexicographic semiring this is the weight of the cheapest path.
    """
    dist = _forward_distances(lattice)
    total = LexWeight.zero()
    for q, w in lattice.finals.items():
        if q in dist:
            total = total.plus(dist[q].times(w))
    if total.is_zero():
        raise EmptyLattice("lattice has no complete path")
    return total


def _forward_distances(lattice: Lattice) -> dict[int, LexWeight]:
    if lattice.num_states == 0:
        raise EmptyLattice("lattice has no states")
    dist: dict[int, LexWeight] = {0: ONE}
    for q in lattice.topological_order:
        if q not in dist:
            continue
        dq = dist[q]
        for arc in lattice.arcs(q):
            w = dq.times(arc.weight)
            old = dist.get(arc.nextstate)
            dist[arc.nextstate] = w if old is None else old.plus(w)
    return dist


def shortest_path(lattice: Lattice) -> tuple[str, LexWeight]:
    """Labels and weight of the cheapest complete path.

    Ties in weight go to the longer label string, then to the
    lexicographically smallest one.
    """
    if lattice.num_states == 0:
        raise EmptyLattice("lattice has no states")
    best: dict[int, tuple[LexWeight, str]] = {0: (ONE, "")}
    for q in lattice.topological_order:
        if q not in best:
            continue
        wq, lq = best[q]
        for arc in lattice.arcs(q):
            cand = (wq.times(arc.weight), lq + (arc.label or ""))
            old = best.get(arc.nextstate)
            if old is None or _path_key(cand) < _path_key(old):
                best[arc.nextstate] = cand
    result = None
    for q, fw in lattice.finals.items():
        if q in best:
            cand = (best[q][0].times(fw), best[q][1])
            if result is None or _path_key(cand) < _path_key(result):
                result = cand
    if result is None or result[0].is_zero():
        raise EmptyLattice("lattice has no complete path")
    return result[1], result[0]


def _path_key(item: tuple[LexWeight, str]) -> tuple[float, float, int, str]:
    # Label comparison is only consistent across extensions between equal-length prefixes.
    w, labels = item
    return (w.edit, w.lm, -len(labels), labels)


def project_lm(weight: LexWeight) -> TropicalWeight:
    """Keep only the language-model dimension of a pair weight."""
    return TropicalWeight(weight.lm)
