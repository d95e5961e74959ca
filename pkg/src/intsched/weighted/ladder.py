"""Geometric ladders of exact rationals.

A ladder with base ``b`` holds 0 and the powers ``b**0, b**1, ...`` up to a
top value.  Values are addressed by an integer index (0 is the value 0,
``i + 1`` is ``b**i``); the rational itself is built only when asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..core import as_fraction


class Ladder:
    def __init__(self, base, top):
        base = as_fraction(base)
        top = as_fraction(top)
        if base <= 1:
            raise ValueError("ladder base must exceed 1")
        if top < 1:
            raise ValueError("ladder top must be at least 1")
        self.base = base
        self.top = top
        self._log_base = math.log(base)
        self._powers = [Fraction(1)]
        # smallest exponent whose power reaches the top
        e = 0
        while self.power(e) < top:
            e += 1
        self.max_exp = e
        self._floats = None

    def power(self, e: int) -> Fraction:
        powers = self._powers
        while len(powers) <= e:
            powers.append(powers[-1] * self.base)
        return powers[e]

    def __len__(self):
        """Number of states, including the zero state."""
        return self.max_exp + 2

    def value(self, idx: int) -> Fraction:
        return Fraction(0) if idx == 0 else self.power(idx - 1)

    def floats(self):
        if self._floats is None:
            self._floats = [0.0] + [float(self.power(e)) for e in range(self.max_exp + 1)]
        return self._floats

    def index_of(self, v) -> int:
        """Index of the largest ladder value <= v (capped at the top rung)."""
        if v < 1:
            return 0
        e = int(math.log(v) / self._log_base)
        e = max(0, min(e, self.max_exp))
        while e > 0 and self.power(e) > v:
            e -= 1
        while e < self.max_exp and self.power(e + 1) <= v:
            e += 1
        return e + 1

    def round_down(self, v) -> Fraction:
        return self.value(self.index_of(as_fraction(v)))


@dataclass(frozen=True)
class RoundedAccumulator:
    """Running total kept on a ladder of powers of (1 + eps/k)."""

    ladder: Ladder
    index: int = 0

    @classmethod
    def start(cls, epsilon, k: int, top) -> RoundedAccumulator:
        return cls(Ladder(1 + as_fraction(epsilon) / k, top))

    @property
    def value(self) -> Fraction:
        return self.ladder.value(self.index)


def round_accumulate(acc: RoundedAccumulator, v) -> RoundedAccumulator:
    """Add ``v`` and round the sum down onto the ladder."""
    total = acc.value + as_fraction(v)
    return RoundedAccumulator(acc.ladder, acc.ladder.index_of(total))


class WeightClasses:
    """Weights rounded down to powers of ``1 + eps``; class c stands for (1+eps)**c."""

    def __init__(self, eps):
        self.ladder = Ladder(1 + as_fraction(eps), 1)
        self.eps = as_fraction(eps)

    def class_of(self, w) -> int:
        w = as_fraction(w)
        lad = self.ladder
        e = int(math.log(w) / lad._log_base)
        while e > 0 and lad.power(e) > w:
            e -= 1
        while lad.power(e + 1) <= w:
            e += 1
        return e

    def value(self, c: int) -> Fraction:
        return self.ladder.power(c)

    def min_class_at_least(self, u) -> int:
        """Smallest class whose value is >= u."""
        u = as_fraction(u)
        if u <= 1:
            return 0
        c = self.class_of(u)
        return c if self.value(c) >= u else c + 1
