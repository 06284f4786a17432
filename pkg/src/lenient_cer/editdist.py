"""Levenshtein distance between a hypothesis string and a reference lattice.

The lattice DP walks states in topological order and keeps, for every
(state, hypothesis prefix) cell, the best partial alignment. It computes the
same quantity as composing the lattice with a unit-cost edit transducer and
taking the shortest path, without materialising the composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from lenient_cer.errors import EmptyLattice, EmptyReference
from lenient_cer.lattice import Lattice, rmepsilon

MATCH = "match"
SUB = "sub"
INS = "ins"
DEL = "del"


@dataclass(frozen=True)
class EditResult:
    distance: int
    substitutions: int
    insertions: int
    deletions: int
    best_path: Sequence
    best_path_lm: float
    alignment: tuple[tuple[str, object, object], ...]

    @property
    def length(self) -> int:
        return len(self.best_path)

    @property
    def rate(self) -> float:
        if not self.best_path:
            raise EmptyReference("best matching path is empty")
        return self.distance / len(self.best_path)


def _counts(alignment) -> tuple[int, int, int]:
    sub = ins = dele = 0
    for op, _, _ in alignment:
        if op == SUB:
            sub += 1
        elif op == INS:
            ins += 1
        elif op == DEL:
            dele += 1
    return sub, ins, dele


def replay(alignment) -> tuple[list, list]:
    """Return (reference side, hypothesis side) reconstructed from an alignment."""
    ref, hyp = [], []
    for op, r, h in alignment:
        if r is not None:
            ref.append(r)
        if h is not None:
            hyp.append(h)
    return ref, hyp


def levenshtein(reference: Sequence, hypothesis: Sequence) -> EditResult:
    """Unit-cost edit distance between two sequences (characters or words).

    On ties the backtrace prefers match/substitution, then deletion, then
    insertion, giving a stable alignment.
    """
    n, m = len(reference), len(hypothesis)
    prev = list(range(m + 1))
    back = [[INS] * (m + 1)]
    back[0][0] = MATCH
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        row = [DEL] + [MATCH] * m
        r = reference[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (r != hypothesis[j - 1])
            up = prev[j] + 1
            left = cur[j - 1] + 1
            if diag <= up and diag <= left:
                cur[j] = diag
                row[j] = MATCH if r == hypothesis[j - 1] else SUB
            elif up <= left:
                cur[j] = up
                row[j] = DEL
            else:
                cur[j] = left
                row[j] = INS
        back.append(row)
        prev = cur

    alignment = []
    i, j = n, m
    while i > 0 or j > 0:
        op = back[i][j]
        if op in (MATCH, SUB):
            alignment.append((op, reference[i - 1], hypothesis[j - 1]))
            i -= 1
            j -= 1
        elif op == DEL:
            alignment.append((DEL, reference[i - 1], None))
            i -= 1
        else:
            alignment.append((INS, None, hypothesis[j - 1]))
            j -= 1
    alignment.reverse()
    sub, ins, dele = _counts(alignment)
    return EditResult(prev[m], sub, ins, dele, reference, 0.0, tuple(alignment))


def edit_distance(lattice: Lattice, hypothesis: str) -> EditResult:
    """Minimum Levenshtein distance from ``hypothesis`` to any lattice path.

    Among paths at minimum distance the selected one has the smallest lm
    weight, then the most characters, then the smallest label string.
    The edit dimension of lattice weights is reserved for this computation,
    so it must be zero on every arc and final weight.
    """
    lattice = rmepsilon(lattice)
    if lattice.num_states == 0:
        raise EmptyLattice("lattice has no states")
    for q in range(lattice.num_states):
        for arc in lattice.arcs(q):
            if arc.weight.edit != 0:
                raise ValueError("lattice arcs must carry zero edit weight")
    for w in lattice.finals.values():
        if w.edit != 0:
            raise ValueError("lattice final weights must carry zero edit weight")

    hyp = hypothesis
    m = len(hyp)
    n = lattice.num_states
    # Cell key: (edits, lm, -path length, path labels); tuple order is the selection order.
    cost: list[list | None] = [None] * n
    back: list[list | None] = [None] * n
    cost[0] = [None] * (m + 1)
    back[0] = [None] * (m + 1)
    cost[0][0] = (0, 0.0, 0, "")

    for q in lattice.topological_order:
        row = cost[q]
        if row is None:
            continue
        brow = back[q]
        for j in range(m):
            c = row[j]
            if c is None:
                continue
            cand = (c[0] + 1, c[1], c[2], c[3])
            old = row[j + 1]
            if old is None or cand < old:
                row[j + 1] = cand
                brow[j + 1] = (INS, q, j, None)
        for arc in lattice.arcs(q):
            r = arc.nextstate
            a = arc.label
            w = arc.weight.lm
            rrow = cost[r]
            if rrow is None:
                rrow = cost[r] = [None] * (m + 1)
                back[r] = [None] * (m + 1)
            rback = back[r]
            for j in range(m + 1):
                c = row[j]
                if c is None:
                    continue
                e, lm, nl, pre = c
                pre = pre + a
                lm = lm + w
                nl -= 1
                cand = (e + 1, lm, nl, pre)
                old = rrow[j]
                if old is None or cand < old:
                    rrow[j] = cand
                    rback[j] = (DEL, q, j, a)
                if j < m:
                    h = hyp[j]
                    if a == h:
                        cand = (e, lm, nl, pre)
                        op = MATCH
                    else:
                        cand = (e + 1, lm, nl, pre)
                        op = SUB
                    old = rrow[j + 1]
                    if old is None or cand < old:
                        rrow[j + 1] = cand
                        rback[j + 1] = (op, q, j, a)

    best = None
    best_state = -1
    for q, fw in lattice.finals.items():
        row = cost[q]
        if row is None or row[m] is None:
            continue
        e, lm, nl, pre = row[m]
        cand = (e, lm + fw.lm, nl, pre)
        if best is None or cand < best:
            best = cand
            best_state = q
    if best is None:
        raise EmptyLattice("lattice has no complete path")

    alignment = []
    q, j = best_state, m
    while True:
        step = back[q][j]
        if step is None:
            break
        op, pq, pj, a = step
        if op == INS:
            alignment.append((INS, None, hyp[j - 1]))
        elif op == DEL:
            alignment.append((DEL, a, None))
        else:
            alignment.append((op, a, hyp[j - 1]))
        q, j = pq, pj
    alignment.reverse()
    sub, ins, dele = _counts(alignment)
    return EditResult(
        distance=best[0],
        substitutions=sub,
        insertions=ins,
        deletions=dele,
        best_path=best[3],
        best_path_lm=best[1],
        alignment=tuple(alignment),
    )


def lenient_cer(lattice: Lattice, hypothesis: str) -> float:
    """Lattice edit distance over the length of the best matching path."""
    result = edit_distance(lattice, hypothesis)
    if not result.best_path:
        raise EmptyReference("best matching lattice path has no characters")
    return result.distance / len(result.best_path)
