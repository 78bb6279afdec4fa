"""Exact distributions and entropy measures."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from maskent.dist import (
    ExactDistribution,
    collision_probability,
    distribution_of,
    float15,
    min_entropy,
    rational_from_str,
    rational_str,
    renyi2_entropy,
    shannon_entropy,
)
from maskent.family import FunctionTable, coordinatewise_table, masked_table, square_family
from maskent.gf import FieldVector, build_field


def _vec(spec, *entries):
    return FieldVector(spec, entries)


def test_distribution_of_identity_is_uniform():
    spec = build_field(3, 1)
    d = distribution_of(FunctionTable.identity(spec, 1))
    assert d.total == 3 and set(d.counts.values()) == {1}
    assert collision_probability(d) == Fraction(1, 3)
    assert shannon_entropy(d) == pytest.approx(math.log2(3), abs=1e-12)
    assert renyi2_entropy(d) == pytest.approx(math.log2(3), abs=1e-12)
    assert min_entropy(d) == pytest.approx(math.log2(3), abs=1e-12)


def test_distribution_of_constant():
    spec = build_field(2, 2)
    f = FunctionTable.constant(spec, 2, _vec(spec, 1, 3))
    d = distribution_of(f)
    assert d.counts == {_vec(spec, 1, 3): 16}
    assert collision_probability(d) == 1
    assert shannon_entropy(d) == 0.0
    assert renyi2_entropy(d) == 0.0
    assert min_entropy(d) == 0.0


def test_square_map_distribution_gf3():
    # x^2 on GF(3) maps (0,1,2) to (0,1,1)
    d = distribution_of(square_family(3, 1))
    spec = build_field(3, 1)
    assert d.counts == {_vec(spec, 0): 1, _vec(spec, 1): 2}
    assert d.total == 3
    assert collision_probability(d) == Fraction(5, 9)
    assert shannon_entropy(d) == pytest.approx(math.log2(3) - 2 / 3, abs=1e-12)
    assert renyi2_entropy(d) == pytest.approx(math.log2(9 / 5), abs=1e-12)
    assert min_entropy(d) == pytest.approx(math.log2(3 / 2), abs=1e-12)


def test_pair_count_oracle():
    # cp equals |{(x, x'): f(x) = f(x')}| / q^(2n) as an exact rational
    spec = build_field(2, 2)
    f = FunctionTable(spec, 1, [2, 0, 2, 1])
    d = distribution_of(f)
    pairs = sum(
        1
        for a in range(4)
        for b in range(4)
        if int(f.codes[a]) == int(f.codes[b])
    )
    assert collision_probability(d) == Fraction(pairs, 16)


def test_validation_errors():
    spec = build_field(2, 1)
    v0, v1 = _vec(spec, 0), _vec(spec, 1)
    with pytest.raises(ValueError, match="total must be positive"):
        ExactDistribution(2, {}, 0)
    with pytest.raises(ValueError, match="counts must be positive"):
        ExactDistribution(2, {v0: 0, v1: 2}, 2)
    with pytest.raises(ValueError, match="sum to total"):
        ExactDistribution(2, {v0: 1, v1: 1}, 3)
    with pytest.raises(ValueError, match="more outcomes"):
        ExactDistribution(1, {v0: 1, v1: 1}, 2)
    d = ExactDistribution.from_counts(2, {v0: 1, v1: 0})
    assert d.counts == {v0: 1} and d.total == 1
    assert d.probability(v1) == 0 and d.probability(v0) == 1


def test_probabilities_sum_to_one_exactly():
    spec = build_field(5, 1)
    f = FunctionTable(spec, 1, [3, 3, 0, 1, 3])
    d = distribution_of(f)
    assert sum(Fraction(c, d.total) for c in d.counts.values()) == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=12))
def test_entropy_ordering(counts):
    spec = build_field(13, 1)
    outcomes = {_vec(spec, i): c for i, c in enumerate(counts)}
    d = ExactDistribution.from_counts(13, outcomes)
    h_min = min_entropy(d)
    h2 = renyi2_entropy(d)
    h = shannon_entropy(d)
    assert h_min <= h2 + 1e-12
    assert h2 <= h + 1e-12
    assert h <= math.log2(d.support_size) + 1e-12
    assert -1e-12 <= h_min


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 3**3 - 1), st.integers(0, 3**3 - 1))
def test_uniform_iff_min_cp(c1, c2):
    # cp = 1/|outcomes seen| iff counts are all equal
    spec = build_field(3, 1)
    f = FunctionTable(spec, 1, [c1 % 3, c2 % 3, (c1 + c2) % 3])
    d = distribution_of(f)
    cp = collision_probability(d)
    uniform = len(set(d.counts.values())) == 1 and len(d.counts) == d.support_size
    assert (cp == Fraction(1, d.support_size)) == uniform
    assert (cp == 1) == (len(d.counts) == 1)


def test_product_rule_for_coordinatewise_tables():
    # cp of a product of independent coordinates = product of coordinate cps
    spec = build_field(3, 1)
    maps = [[0, 1, 1], [2, 2, 0]]
    f = coordinatewise_table(spec, maps)
    joint_cp = collision_probability(distribution_of(f))
    parts = []
    for h in maps:
        fi = FunctionTable(spec, 1, h)
        parts.append(collision_probability(distribution_of(fi)))
    assert joint_cp == parts[0] * parts[1]


def test_chain_rule_for_coordinatewise_tables():
    # Shannon entropy of a coordinate-wise g_k splits into per-coordinate sums
    spec = build_field(3, 1)
    f = coordinatewise_table(spec, [[0, 1, 1], [2, 0, 0]])
    for k_code in range(9):
        k = FieldVector(spec, (k_code % 3, k_code // 3))
        g = masked_table(f, k)
        total = shannon_entropy(distribution_of(g))
        split = 0.0
        for i in range(2):
            hi = [spec.add(_coord_map(f, i, x), spec.mul(k[i], x)) for x in range(3)]
            gi = FunctionTable(spec, 1, hi)
            split += shannon_entropy(distribution_of(gi))
        assert total == pytest.approx(split, abs=1e-9)


def _coord_map(f, i, x):
    """Output coordinate i of the coordinate-wise f at x_i = x."""
    # place x at coordinate i, zeros elsewhere, and read coordinate i
    code = x * f.q**i
    out = int(f.codes[code])
    return (out // f.q**i) % f.q


def test_rational_serialization():
    assert rational_str(Fraction(5, 9)) == "5/9"
    assert rational_str(Fraction(0)) == "0/1"
    assert rational_from_str("5/9") == Fraction(5, 9)
    assert rational_from_str("7") == Fraction(7)
    for frac in (Fraction(3, 4), Fraction(-1, 8), Fraction(12, 30)):
        assert rational_from_str(rational_str(frac)) == frac


def test_float15():
    assert float15(0.8479969065549501) == 0.84799690655495
    assert float15(1.0) == 1.0
    assert float15(Fraction(5, 9)) == 0.555555555555556
