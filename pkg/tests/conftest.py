import random

import pytest

from lenient_cer import fixtures as fx
from lenient_cer.lattice import Arc, Lattice
from lenient_cer.semiring import LexWeight


@pytest.fixture(scope="session")
def readings():
    return fx.readings()


@pytest.fixture(scope="session")
def lexicon():
    return fx.lexicon()


@pytest.fixture(scope="session")
def model():
    return fx.ngram_model()


@pytest.fixture
def resources():
    return fx.resources()


def string_levenshtein(a, b):
    """Textbook Wagner-Fischer table, kept independent of the package code."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[len(a)][len(b)]


def enumerate_paths(lattice):
    """All complete paths as (labels, edit, lm), by plain recursion."""
    out = []

    def walk(q, labels, edit, lm):
        if q in lattice.finals:
            f = lattice.finals[q]
            out.append((labels, edit + f.edit, lm + f.lm))
        for arc in lattice.arcs(q):
            walk(arc.nextstate, labels + (arc.label or ""), edit + arc.weight.edit, lm + arc.weight.lm)

    if lattice.num_states:
        walk(0, "", 0.0, 0.0)
    return out


def random_lattice(
    rng,
    max_states=8,
    alphabet="abcde",
    eps_prob=0.0,
    edit_weights=False,
    lm_weights=True,
    require_path=True,
):
    """Random acyclic lattice with arcs only from lower to higher state ids.

    Weights are multiples of 0.25 so float sums are exact.
    """
    while True:
        n = rng.randint(1, max_states)
        arcs = [[] for _ in range(n)]
        for q in range(n):
            for _ in range(rng.randint(0, 3)):
                if q == n - 1:
                    break
                r = rng.randint(q + 1, n - 1)
                label = None if rng.random() < eps_prob else rng.choice(alphabet)
                edit = rng.randint(0, 4) * 0.25 if edit_weights else 0.0
                lm = rng.randint(0, 8) * 0.25 if lm_weights else 0.0
                arcs[q].append(Arc(label, LexWeight(edit, lm), r))
        finals = {}
        for q in range(n):
            if rng.random() < 0.35 or q == n - 1:
                edit = rng.randint(0, 2) * 0.25 if edit_weights else 0.0
                lm = rng.randint(0, 4) * 0.25 if lm_weights else 0.0
                finals[q] = LexWeight(edit, lm)
        lat = Lattice(arcs, finals)
        if not require_path or enumerate_paths(lat):
            return lat


def random_string(rng, alphabet="abcde", max_len=6):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
