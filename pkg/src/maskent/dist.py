"""Exact distributions on finite supports and their randomness measures.

Collision probabilities are exact rationals end to end (stdlib
``fractions.Fraction``); only the final logarithms are binary64.  All
entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping

from maskent.gf import FieldVector

if TYPE_CHECKING:
    from maskent.family import FunctionTable


def rational_str(value: Fraction) -> str:
    """Serialize a rational as "num/den" in lowest terms."""
    return f"{value.numerator}/{value.denominator}"


def rational_from_str(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den) if den else 1)


def float15(value: float) -> float:
    """Round to 15 significant digits, the serialized float precision."""
    return float(format(float(value), ".15g"))


@dataclass(frozen=True)
class ExactDistribution:
    """Distribution with integer outcome counts over a common denominator.

    ``counts`` maps outcomes to positive integers; outcomes with count 0
    are absent.  The probability of ``s`` is ``counts[s] / total``.
    """

    support_size: int
    counts: Mapping[FieldVector, int]
    total: int

    def __post_init__(self):
        if self.total <= 0:
            raise ValueError("total must be positive")
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("counts must be positive; drop zero-count outcomes")
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")
        if len(self.counts) > self.support_size:
            raise ValueError("more outcomes than the support allows")

    @classmethod
    def from_counts(cls, support_size: int, counts: Mapping[FieldVector, int]) -> "ExactDistribution":
        kept = {s: int(c) for s, c in counts.items() if c != 0}
        return cls(support_size, kept, sum(kept.values()))

    def probability(self, outcome: FieldVector) -> Fraction:
        return Fraction(self.counts.get(outcome, 0), self.total)


def distribution_of(table: "FunctionTable") -> ExactDistribution:
    """Law of table(X) for X uniform over the table's domain GF(q)^n."""
    counts: dict[FieldVector, int] = {}
    for out in table.output_vectors():
        counts[out] = counts.get(out, 0) + 1
    return ExactDistribution(table.size, counts, table.size)


def collision_probability(d: ExactDistribution) -> Fraction:
    """sum_s Pr(s)^2, exactly; equals Pr(B = B') for an independent copy B'."""
    return Fraction(sum(c * c for c in d.counts.values()), d.total * d.total)


def shannon_entropy(d: ExactDistribution) -> float:
    """-sum p log2 p in bits, over outcomes of nonzero probability."""
    clog = sum(c * math.log2(c) for c in d.counts.values())
    return math.log2(d.total) - clog / d.total


def renyi2_entropy(d: ExactDistribution) -> float:
    """-log2 of the exact collision probability."""
    cp = collision_probability(d)
    return math.log2(cp.denominator) - math.log2(cp.numerator)


def min_entropy(d: ExactDistribution) -> float:
    """-log2 of the largest outcome probability."""
    return math.log2(d.total) - math.log2(max(d.counts.values()))
