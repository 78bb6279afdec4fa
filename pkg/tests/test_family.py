"""Masking family statistics, bounds, identities, and tightness apparatus."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maskent._rng import SplitMix64
from maskent.dist import (
    collision_probability,
    distribution_of,
    rational_str,
    renyi2_entropy,
    shannon_entropy,
)
from maskent.family import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    FunctionTable,
    average_bounds,
    coordinatewise_table,
    diagonal_quadratic,
    family_averages,
    image_stats,
    is_coordinatewise,
    joint_collision,
    masked_table,
    preimage_profile,
    resolve_budget,
    shell_decomposition,
    square_family,
    tightness_predictions,
    total_weight,
    vector_code,
    vector_from_code,
)
from maskent.gf import FieldVector, build_field, field_for_order, hamming_weight, zero_vector
from maskent.verify import random_table


def _random_f(q, n, seed):
    return random_table(field_for_order(q), n, SplitMix64(seed))


def test_vector_code_is_base_q_little_endian():
    spec = build_field(3, 1)
    assert vector_code(FieldVector(spec, (1, 2))) == 1 + 2 * 3
    assert vector_code(FieldVector(spec, (0, 0, 1))) == 9
    assert vector_from_code(spec, 2, 7) == FieldVector(spec, (1, 2))
    with pytest.raises(ValueError, match="out of range"):
        vector_from_code(spec, 2, 9)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 8, 9]), st.integers(1, 3), st.data())
def test_vector_code_roundtrip(q, n, data):
    spec = field_for_order(q)
    code = data.draw(st.integers(0, q**n - 1))
    assert vector_code(vector_from_code(spec, n, code)) == code


def test_function_table_validation():
    spec = build_field(2, 1)
    with pytest.raises(ValueError, match="expected 4 output codes"):
        FunctionTable(spec, 2, [0, 1, 2])
    with pytest.raises(ValueError, match="lie in"):
        FunctionTable(spec, 2, [0, 1, 2, 4])
    with pytest.raises(ValueError, match="lie in"):
        FunctionTable(spec, 2, [0, 1, 2, -1])
    with pytest.raises(ValueError, match="must be integers"):
        FunctionTable(spec, 2, [0.0, 1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="dimension must be >= 1"):
        FunctionTable(spec, 0, [])
    f = FunctionTable(spec, 2, [0, 1, 2, 3])
    with pytest.raises(ValueError):
        f.codes[0] = 1


def test_function_table_call_and_constructors():
    spec = build_field(3, 1)
    ident = FunctionTable.identity(spec, 2)
    x = FieldVector(spec, (2, 1))
    assert ident(x) == x
    const = FunctionTable.constant(spec, 2, x)
    assert const(FieldVector(spec, (0, 0))) == x
    fc = FunctionTable.from_callable(spec, 2, lambda v: v)
    assert fc == ident
    assert fc is not ident and hash(fc) == hash(ident)
    outs = [vector_from_code(spec, 2, (c * 2) % 9) for c in range(9)]
    ft = FunctionTable.from_outputs(spec, 2, outs)
    assert ft(FieldVector(spec, (1, 0))) == vector_from_code(spec, 2, 2)
    with pytest.raises(ValueError, match="does not match"):
        ident(FieldVector(spec, (1,)))


def test_function_table_json_roundtrip():
    f = _random_f(3, 2, seed=9)
    doc = f.to_json_dict()
    assert doc["p"] == 3 and doc["m"] == 1 and doc["n"] == 2
    assert len(doc["outputs"]) == 9 and all(len(row) == 2 for row in doc["outputs"])
    again = FunctionTable.from_json_dict(json.loads(json.dumps(doc)))
    assert again == f
    assert again.digest() == f.digest()


def test_function_table_json_errors():
    good = square_family(3, 1).to_json_dict()
    assert good["outputs"] == [[0], [1], [1]]
    for key in ("p", "m", "n", "outputs"):
        broken = dict(good)
        del broken[key]
        with pytest.raises(ValueError, match=f"missing '{key}'"):
            FunctionTable.from_json_dict(broken)
    with pytest.raises(ValueError, match="expected 3 outputs"):
        FunctionTable.from_json_dict({**good, "outputs": good["outputs"][:-1]})
    with pytest.raises(ValueError, match="indices in"):
        FunctionTable.from_json_dict({**good, "outputs": [[0], [1], [3]]})
    with pytest.raises(ValueError, match="list of 1"):
        FunctionTable.from_json_dict({**good, "outputs": [[0], [1], [1, 0]]})
    with pytest.raises(ValueError, match="JSON object"):
        FunctionTable.from_json_dict([1, 2, 3])
    with pytest.raises(ValueError, match="characteristic must be prime"):
        FunctionTable.from_json_dict({**good, "p": 6})


def test_digest_is_stable():
    assert square_family(3, 1).digest() == "84d0c949fb99348a"
    assert square_family(3, 1).digest() == square_family(3, 1).digest()
    assert square_family(3, 1).digest() != square_family(3, 2).digest()


def test_masked_table_matches_vector_arithmetic():
    from maskent.gf import mask_product, vector_add

    f = _random_f(3, 2, seed=4)
    spec = f.spec
    for k_code in range(9):
        k = vector_from_code(spec, 2, k_code)
        g = masked_table(f, k)
        for x_code in range(9):
            x = vector_from_code(spec, 2, x_code)
            assert g(x) == vector_add(f(x), mask_product(k, x))


def test_masked_table_examples():
    spec = build_field(2, 1)
    f = _random_f(2, 2, seed=3)
    assert masked_table(f, zero_vector(f.spec, 2)) == f
    # f = 0 with an all-nonzero mask is the bijection x -> k*x
    zero = FunctionTable.constant(spec, 2, zero_vector(spec, 2))
    g = masked_table(zero, FieldVector(spec, (1, 1)))
    assert sorted(int(c) for c in g.codes) == [0, 1, 2, 3]
    # x^2 + x vanishes identically on GF(2)
    sq = square_family(2, 1)
    g1 = masked_table(sq, FieldVector(spec, (1,)))
    assert [int(c) for c in g1.codes] == [0, 0]
    with pytest.raises(ValueError, match="mask does not match"):
        masked_table(f, FieldVector(build_field(3, 1), (0, 0)))


def test_bounds_known_values():
    b21 = average_bounds(2, 1)
    assert b21.cp_bound == Fraction(3, 4)
    assert b21.h2_bound == pytest.approx(0.4150375, abs=5e-8)
    b22 = average_bounds(2, 2)
    assert b22.cp_bound == Fraction(9, 16)
    assert b22.h2_bound == pytest.approx(0.8300750, abs=5e-8)
    b31 = average_bounds(3, 1)
    assert b31.cp_bound == Fraction(5, 9)
    assert b31.h2_bound == pytest.approx(0.8479969, abs=5e-8)
    assert average_bounds(2, 4).cp_bound == Fraction(81, 256)
    with pytest.raises(ValueError):
        average_bounds(1, 1)
    with pytest.raises(ValueError):
        average_bounds(2, 0)


def _dist_oracle(f):
    """Family averages through the independent distribution code path."""
    dists = [
        distribution_of(masked_table(f, vector_from_code(f.spec, f.n, k)))
        for k in range(f.size)
    ]
    cps = [collision_probability(d) for d in dists]
    avg_cp = sum(cps, Fraction(0)) / len(cps)
    avg_h2 = sum(renyi2_entropy(d) for d in dists) / len(dists)
    avg_sh = sum(shannon_entropy(d) for d in dists) / len(dists)
    return avg_cp, avg_h2, avg_sh, cps


@pytest.mark.parametrize("q,n,seed", [(2, 2, 1), (3, 1, 2), (3, 2, 3), (4, 1, 4), (5, 1, 5)])
def test_family_averages_against_dist_oracle(q, n, seed):
    f = _random_f(q, n, seed)
    report = family_averages(f, keep_per_k=True)
    avg_cp, avg_h2, avg_sh, cps = _dist_oracle(f)
    assert report.avg_cp == avg_cp
    assert report.avg_h2 == pytest.approx(avg_h2, abs=1e-12)
    assert report.avg_shannon == pytest.approx(avg_sh, abs=1e-12)
    assert [s.cp for s in report.per_k] == cps
    assert report.f_digest == f.digest()


def test_family_averages_zero_function_gf2():
    spec = build_field(2, 1)
    zero = FunctionTable.constant(spec, 1, zero_vector(spec, 1))
    report = family_averages(zero, keep_per_k=True)
    assert report.avg_cp == Fraction(3, 4)
    assert report.equality and report.coordinatewise
    assert [s.cp for s in report.per_k] == [Fraction(1), Fraction(1, 2)]


def test_identity_gf2_per_k():
    # g_0 = x is a bijection, g_1 = 0 is constant; average (1/2 + 1)/2
    spec = build_field(2, 1)
    report = family_averages(FunctionTable.identity(spec, 1), keep_per_k=True)
    assert sorted(s.cp for s in report.per_k) == [Fraction(1, 2), Fraction(1)]
    assert report.avg_cp == Fraction(3, 4)


def test_swap_is_strict():
    spec = build_field(2, 1)
    swap = FunctionTable(spec, 2, [0, 2, 1, 3])
    report = family_averages(swap)
    assert report.avg_cp == Fraction(5, 16)
    assert not report.coordinatewise and not report.equality
    assert report.avg_cp < report.cp_bound


def test_theorem_report_serialization():
    report = family_averages(square_family(3, 1), keep_per_k=True)
    doc = report.to_json_dict()
    assert doc["avg_cp"] == "5/9"
    assert doc["cp_bound"] == "5/9"
    assert doc["equality"] is True
    assert doc["avg_cp_float"] == 0.555555555555556
    assert len(doc["per_k"]) == 3
    assert doc["per_k"][0]["k"] == [0]
    assert doc["per_k"][0]["cp"] == "5/9"
    slim = report.to_json_dict(include_per_k=False)
    assert "per_k" not in slim
    assert report.cp_slack() == 0
    assert abs(report.h2_slack()) < 1e-12


@pytest.mark.parametrize("q,n,seed", [(2, 1, 0), (2, 2, 1), (3, 1, 2), (3, 2, 3), (4, 1, 6)])
def test_joint_collision_identity(q, n, seed):
    f = _random_f(q, n, seed)
    avg_cp = family_averages(f).avg_cp
    triple = joint_collision(f, method="triple")
    pairs = joint_collision(f, method="pairs")
    auto = joint_collision(f)
    assert triple == pairs == auto == avg_cp


def test_joint_collision_method_handling():
    f = _random_f(2, 1, 0)
    with pytest.raises(ValueError, match="unknown method"):
        joint_collision(f, method="exact")
    with pytest.raises(BudgetExceededError, match="triple enumeration"):
        joint_collision(f, method="triple", budget=7)
    # auto falls back to pairs when the triple cap is exceeded
    big = _random_f(3, 3, 1)
    assert big.size**3 > 2**14
    assert joint_collision(big, method="auto") == family_averages(big).avg_cp


def test_shell_decomposition_zero_function():
    spec = build_field(2, 1)
    zero = FunctionTable.constant(spec, 1, zero_vector(spec, 1))
    terms = shell_decomposition(zero)
    assert [(t.distance, t.shell_mass, t.conditional_collision) for t in terms] == [
        (0, Fraction(1, 2), Fraction(1)),
        (1, Fraction(1, 2), Fraction(1, 2)),
    ]
    assert sum(t.shell_mass * t.conditional_collision for t in terms) == Fraction(3, 4)


@pytest.mark.parametrize("q,n,seed", [(2, 2, 0), (3, 2, 1), (4, 1, 2), (5, 1, 3), (2, 3, 4)])
def test_shell_decomposition_properties(q, n, seed):
    f = _random_f(q, n, seed)
    terms = shell_decomposition(f)
    assert [t.distance for t in terms] == list(range(n + 1))
    assert sum(t.shell_mass for t in terms) == 1
    for t in terms:
        expected_mass = Fraction(math.comb(n, t.distance) * (q - 1) ** t.distance, q**n)
        assert t.shell_mass == expected_mass
        assert t.conditional_collision <= Fraction(1, q**t.distance)
    recombined = sum(t.shell_mass * t.conditional_collision for t in terms)
    assert recombined == joint_collision(f, method="pairs")


def test_shell_equality_for_coordinatewise():
    f = square_family(3, 2)
    for t in shell_decomposition(f):
        assert t.conditional_collision == Fraction(1, 3**t.distance)
    swap = FunctionTable(build_field(2, 1), 2, [0, 2, 1, 3])
    conds = [t.conditional_collision for t in shell_decomposition(swap)]
    assert any(c < Fraction(1, 2**d) for d, c in enumerate(conds))


def test_is_coordinatewise():
    spec = build_field(2, 1)
    assert is_coordinatewise(square_family(2, 2))
    assert is_coordinatewise(coordinatewise_table(spec, [[1, 0], [0, 0]]))
    assert not is_coordinatewise(FunctionTable(spec, 2, [0, 2, 1, 3]))
    # any n=1 function is trivially coordinate-wise
    for seed in range(3):
        assert is_coordinatewise(_random_f(5, 1, seed))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 2), st.data())
def test_coordinatewise_equality_property(q, n, data):
    spec = field_for_order(q)
    maps = [
        data.draw(st.lists(st.integers(0, q - 1), min_size=q, max_size=q))
        for _ in range(n)
    ]
    f = coordinatewise_table(spec, maps)
    assert is_coordinatewise(f)
    report = family_averages(f)
    assert report.equality
    assert report.avg_cp == report.cp_bound


def test_square_family_tables():
    assert [int(c) for c in square_family(2, 1).codes] == [0, 1]
    assert [int(c) for c in square_family(4, 1).codes] == [0, 1, 3, 2]
    assert [int(c) for c in square_family(3, 1).codes] == [0, 1, 1]
    assert sorted(int(c) for c in square_family(8, 1).codes) == list(range(8))
    assert set(int(c) for c in square_family(3, 1).codes) == {0, 1}


def test_coordinatewise_table_validation():
    spec = build_field(3, 1)
    with pytest.raises(ValueError, match="at least one"):
        coordinatewise_table(spec, [])
    with pytest.raises(ValueError, match="must have 3 entries"):
        coordinatewise_table(spec, [[0, 1]])
    with pytest.raises(ValueError, match="outside"):
        coordinatewise_table(spec, [[0, 1, 3]])
    f = coordinatewise_table(spec, [[2, 2, 2], [0, 1, 2]])
    assert f(FieldVector(spec, (0, 2))) == FieldVector(spec, (2, 2))


def test_diagonal_quadratic():
    spec = build_field(5, 1)
    assert diagonal_quadratic(spec, [1], [0], [0]) == square_family(5, 1)
    with pytest.raises(ValueError, match="a_1 must be nonzero"):
        diagonal_quadratic(spec, [1, 0], [0, 0], [0, 0])
    with pytest.raises(ValueError, match="share one length"):
        diagonal_quadratic(spec, [1], [0, 0], [0])
    f = diagonal_quadratic(spec, [2], [3], [1])
    expected = [(2 * x * x + 3 * x + 1) % 5 for x in range(5)]
    assert [int(c) for c in f.codes] == expected
    assert is_coordinatewise(f)


@pytest.mark.parametrize("q,n", [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (5, 1)])
def test_diagonal_quadratic_matches_square_averages(q, n):
    spec = field_for_order(q)
    rng = SplitMix64(q * 100 + n)
    base = family_averages(square_family(q, n))
    for _ in range(3):
        a = [1 + rng.below(q - 1) for _ in range(n)]
        b = [rng.below(q) for _ in range(n)]
        c = [rng.below(q) for _ in range(n)]
        report = family_averages(diagonal_quadratic(spec, a, b, c))
        assert report.avg_cp == base.avg_cp
        assert report.avg_h2 == pytest.approx(base.avg_h2, abs=1e-12)
        assert report.avg_shannon == pytest.approx(base.avg_shannon, abs=1e-12)


def test_tightness_predictions_values():
    p21 = tightness_predictions(2, 1)
    assert (p21.avg_shannon, p21.avg_h2) == (0.5, 0.5)
    p31 = tightness_predictions(3, 1)
    assert p31.avg_shannon == pytest.approx(0.9182958, abs=5e-8)
    assert p31.avg_h2 == pytest.approx(0.8479969, abs=5e-8)
    p41 = tightness_predictions(4, 1)
    assert p41.avg_shannon == pytest.approx(1.25, abs=1e-12)
    assert p41.avg_h2 == pytest.approx(1.25, abs=1e-12)
    # the odd-q Renyi average equals the family bound
    assert tightness_predictions(5, 2).avg_h2 == pytest.approx(
        average_bounds(5, 2).h2_bound, abs=1e-12
    )
    with pytest.raises(ValueError):
        tightness_predictions(6, 1)
    with pytest.raises(ValueError, match="dimension"):
        tightness_predictions(3, 0)


def test_square_even_q_per_k_collision():
    # even q: cp(g_k) = 2^weight(k) / q^n exactly
    for q, n in [(2, 1), (2, 2), (4, 1), (4, 2), (8, 1)]:
        f = square_family(q, n)
        report = family_averages(f, keep_per_k=True)
        for stats in report.per_k:
            w = hamming_weight(stats.k)
            assert stats.cp == Fraction(2**w, q**n)


def test_square_odd_q_per_k_collision():
    # odd q: every g_k has per-entry collision (2q-1)/q^2
    for q, n in [(3, 1), (3, 2), (5, 1), (7, 1), (9, 1), (9, 2)]:
        f = square_family(q, n)
        report = family_averages(f, keep_per_k=True)
        expected = Fraction(2 * q - 1, q * q) ** n
        for stats in report.per_k:
            assert stats.cp == expected


def test_preimage_profile_gf5():
    prof = preimage_profile(5, 2)
    assert prof.sizes == (2, 0, 0, 2, 1)
    assert prof.histogram() == {0: 2, 1: 1, 2: 2}
    # singleton lands at -k^2/4
    spec = field_for_order(5)
    y = spec.neg(spec.mul(spec.mul(2, 2), spec.inv(spec.scalar(4))))
    assert y == 4 and prof.sizes[y] == 1


def test_preimage_profile_even_q():
    assert preimage_profile(4, 0).sizes == (1, 1, 1, 1)
    for k in (1, 2, 3):
        assert preimage_profile(4, k).histogram() == {0: 2, 2: 2}
    assert preimage_profile(2, 1).histogram() == {0: 1, 2: 1}


def test_preimage_sizes_sum_to_q():
    for q in (2, 3, 4, 5, 7, 8, 9):
        for k in range(q):
            assert sum(preimage_profile(q, k).sizes) == q


def test_total_weight():
    assert total_weight(3, 1) == 2
    assert total_weight(2, 2) == 4
    assert total_weight(3, 2) == 12
    with pytest.raises(ValueError):
        total_weight(1, 1)
    # brute force agreement
    from maskent.family import _coords_matrix

    for q in (2, 3, 4, 5):
        for n in (1, 2, 3):
            brute = int(np.count_nonzero(_coords_matrix(q, n)))
            assert total_weight(q, n) == brute


def test_image_stats_examples():
    spec = build_field(2, 1)
    zero = FunctionTable.constant(spec, 1, zero_vector(spec, 1))
    st_zero = image_stats(zero)
    assert st_zero.sizes == (1, 2)
    assert st_zero.max_size == 2 and st_zero.max_exceeds_half
    sq3 = image_stats(square_family(3, 1))
    assert sq3.sizes == (2, 2, 2)
    assert sq3.avg_size == 2 and sq3.avg_meets_bound
    sq4 = image_stats(square_family(4, 1))
    assert sorted(sq4.sizes) == [2, 2, 2, 4]
    assert sq4.avg_size == Fraction(5, 2)
    assert sq4.avg_size >= Fraction(16, 7)
    # n = 2: corollary flags are not applicable
    st2 = image_stats(square_family(2, 2))
    assert st2.max_exceeds_half is None and st2.avg_meets_bound is None


def test_image_stats_against_masked_tables():
    f = _random_f(4, 1, seed=11)
    stats = image_stats(f)
    for k_code in range(4):
        k = vector_from_code(f.spec, 1, k_code)
        expected = len({int(c) for c in masked_table(f, k).codes})
        assert stats.sizes[k_code] == expected


def test_resolve_budget(monkeypatch):
    monkeypatch.delenv("MASKENT_BUDGET", raising=False)
    assert resolve_budget() == DEFAULT_BUDGET
    assert resolve_budget(77) == 77
    monkeypatch.setenv("MASKENT_BUDGET", "1000")
    assert resolve_budget() == 1000
    assert resolve_budget(12) == 12
    monkeypatch.setenv("MASKENT_BUDGET", "zero")
    with pytest.raises(ValueError, match="MASKENT_BUDGET"):
        resolve_budget()
    monkeypatch.setenv("MASKENT_BUDGET", "-4")
    with pytest.raises(ValueError, match="MASKENT_BUDGET"):
        resolve_budget()
    with pytest.raises(ValueError, match="budget must be"):
        resolve_budget(0)


def test_budget_guard(monkeypatch):
    f = _random_f(3, 2, seed=0)
    with pytest.raises(BudgetExceededError, match="raise MASKENT_BUDGET"):
        family_averages(f, budget=80)
    monkeypatch.setenv("MASKENT_BUDGET", "80")
    with pytest.raises(BudgetExceededError):
        family_averages(f)
    monkeypatch.setenv("MASKENT_BUDGET", "81")
    assert family_averages(f).avg_cp <= average_bounds(3, 2).cp_bound
