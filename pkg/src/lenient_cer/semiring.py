"""Tropical and lexicographic <Tropical, Tropical> weights.

Tropical: plus = min, times = +, zero = inf, one = 0.
The lexicographic pair compares the edit dimension first and the language
model dimension second; times is component-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf


@dataclass(frozen=True, order=True)
class TropicalWeight:
    value: float = 0.0

    def __post_init__(self):
        if math.isnan(self.value):
            raise ValueError("tropical weight cannot be NaN")

    @classmethod
    def zero(cls) -> TropicalWeight:
        return cls(INF)

    @classmethod
    def one(cls) -> TropicalWeight:
        return cls(0.0)

    def plus(self, other: TropicalWeight) -> TropicalWeight:
        return self if self.value <= other.value else other

    def times(self, other: TropicalWeight) -> TropicalWeight:
        return TropicalWeight(self.value + other.value)

    def is_zero(self) -> bool:
        return self.value == INF

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True, order=True)
class LexWeight:
    """Pair weight ordered as (edit, lm).

    Field order makes the dataclass ordering the lexicographic one, so
    ``plus`` is simply ``min``.
    """

    edit: float = 0.0
    lm: float = 0.0

    def __post_init__(self):
        if math.isnan(self.edit) or math.isnan(self.lm):
            raise ValueError("lexicographic weight cannot contain NaN")

    @classmethod
    def zero(cls) -> LexWeight:
        return cls(INF, INF)

    @classmethod
    def one(cls) -> LexWeight:
        return cls(0.0, 0.0)

    def plus(self, other: LexWeight) -> LexWeight:
        return self if self <= other else other

    def times(self, other: LexWeight) -> LexWeight:
        if self.is_zero() or other.is_zero():
            return LexWeight.zero()
        return LexWeight(self.edit + other.edit, self.lm + other.lm)

    def is_zero(self) -> bool:
        return self.edit == INF and self.lm == INF

    @property
    def edit_weight(self) -> TropicalWeight:
        return TropicalWeight(self.edit)

    @property
    def lm_weight(self) -> TropicalWeight:
        return TropicalWeight(self.lm)

    def to_text(self) -> str:
        return f"{_fmt(self.edit)},{_fmt(self.lm)}"

    @classmethod
    def from_text(cls, text: str) -> LexWeight:
        edit, _, lm = text.partition(",")
        if not lm:
            raise ValueError(f"weight must be 'edit,lm': {text!r}")
        return cls(float(edit), float(lm))


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))
