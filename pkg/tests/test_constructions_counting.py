from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divlab import constructions as C
from divlab.counting import (
    BoundSpec,
    binom,
    bounds_monotone_in_n,
    check_key3,
    check_key4,
    count_generated_avoiding,
    count_up_closure,
    f_abc,
    fano_gamma2,
    gen_binom,
    generated_diversity,
    generated_diversity_witness,
    key4_sides,
    l3_gamma3,
    min_f_abc,
    t0_gamma2,
    theorem_bounds,
    triangle_lower_certificate,
    triangle_target,
)
from divlab.family import FamilyFormatError, covering_number, diversity, is_intersecting, is_saturated


@pytest.mark.parametrize(
    "name, size, n, k, tau",
    [
        ("fano", 7, 7, 3, 3),
        ("t0", 10, 6, 3, 3),
        ("l3", 13, 13, 4, 4),
        ("parity-blocks", 20, 11, 4, 4),
        ("triangle-pairs", 27, 9, 4, 4),
        ("pentagon-bridge", 28, 10, 4, 4),
        ("pentagon-cycle", 75, 15, 5, 5),
        ("t0-triangle", 10**2 * 3, 18, 6, 6),
    ],
)
def test_named_shapes(name, size, n, k, tau):
    fam = C.NAMED[name]()
    assert (len(fam), fam.n, fam.k) == (size, n, k)
    assert is_intersecting(fam)
    assert covering_number(fam) == tau


@pytest.mark.parametrize("name", ["l3", "parity-blocks", "triangle-pairs", "pentagon-bridge"])
def test_triple_diversity_three(name):
    fam = C.NAMED[name]()
    assert diversity(fam, 3) == 3
    assert is_saturated(fam)


def test_generated_sizes():
    assert C.generated(C.fano(), 8, 4).size() == 35
    assert C.generated(C.fano(), 8, 4).size() == len(C.generated(C.fano(), 8, 4).enumerate())
    assert generated_diversity(C.generated(C.t0(), 9, 4), 2) == 7 == t0_gamma2(9, 4)
    assert generated_diversity(C.generated(C.l3(), 14, 5), 3) == 21 == l3_gamma3(14, 5)


@pytest.mark.parametrize("n", [20, 40, 80, 117])
def test_closed_forms_beyond_enumeration(n):
    assert generated_diversity(C.generated(C.fano(), n, 3), 2) == fano_gamma2(n, 3)
    assert generated_diversity(C.generated(C.t0(), n, 4), 2) == t0_gamma2(n, 4)
    assert generated_diversity(C.generated(C.l3(), n, 5), 3) == l3_gamma3(n, 5)


def test_generated_witness_is_consistent():
    gf = C.generated(C.fano(), 12, 4)
    value, S = generated_diversity_witness(gf, 2)
    assert bin(S).count("1") == 2
    assert count_generated_avoiding(gf, S) == value
    assert count_generated_avoiding(gf, [v + 1 for v in range(12) if S >> v & 1]) == value


def test_generated_errors():
    with pytest.raises(FamilyFormatError):
        C.generated(C.l3(), 13, 3)
    with pytest.raises(FamilyFormatError):
        C.generated(C.fano(), 6, 3)
    with pytest.raises(C.GroundSetTooLarge):
        C.generated(C.fano(), 200, 4).enumerate()
    with pytest.raises(C.GroundSetTooLarge):
        C.ekr_triangle(12)


@settings(max_examples=120, deadline=None)
@given(
    st.integers(3, 10).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.integers(1, min(4, n)),
            st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=5),
            st.integers(0, (1 << n) - 1),
        )
    )
)
def test_up_closure_count_matches_enumeration(args):
    n, k, gens, avoid = args
    gens = [g for g in gens if bin(g).count("1") <= k]
    expected = sum(
        1
        for c in combinations(range(n), k)
        if not (m := sum(1 << v for v in c)) & avoid and any(g & m == g for g in gens)
    )
    assert count_up_closure(n, k, gens, avoid) == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 30), st.integers(0, 10))
def test_gen_binom_agrees_on_integers(m, r):
    assert gen_binom(m, r) == comb(m, r)
    assert binom(m, r) == comb(m, r)


def test_binom_out_of_range():
    assert binom(-1, 2) == 0 and binom(3, -1) == 0 and binom(3, 5) == 0


def test_wreath_small():
    w = C.wreath(C.triangle(), C.triangle())
    assert (len(w), w.n, w.k) == (3**2 * 3, 9, 4)
    assert covering_number(w) == 4
    with pytest.raises(C.GroundSetTooLarge):
        C.wreath(C.l3(), C.fano())


def test_build_dispatch():
    assert C.build("fano") == C.fano()
    assert isinstance(C.build("generated-t0", n=9, k=4), C.GeneratedFamily)
    assert len(C.build("complete", n=5, k=2)) == 10
    assert C.build("ekr-triangle", k=2).k == 4
    with pytest.raises(KeyError):
        C.build("generated-t0")
    with pytest.raises(KeyError):
        C.build("nope")


def test_labelings_resource():
    data = C.labelings()
    assert data["l3"]["difference_set"] == [0, 1, 3, 9]
    assert len(set(data["parity_blocks"]["vertices"].values())) == 11


# --- bounds and inequalities ---------------------------------------------------------


def test_equality_case_of_main_bound():
    b = theorem_bounds(BoundSpec(ell=2, k=3, n=117, m_value=2))
    assert b["main"] == 2 == fano_gamma2(117, 3)
    assert b["hypothesis_holds"]
    assert b["threshold_factor"] == Fraction(12)
    assert b["degree_constant"] is None
    assert theorem_bounds(BoundSpec(ell=3, k=4, n=100, m_value=3))["degree_constant"] == 2


def test_bound_validation_and_monotonicity():
    with pytest.raises(ValueError):
        BoundSpec(ell=3, k=3, n=10, m_value=2)
    with pytest.raises(ValueError):
        BoundSpec(ell=2, k=3, n=10, m_value=0)
    assert bounds_monotone_in_n(2, 5, 2, 20, 200)
    assert bounds_monotone_in_n(3, 6, 3, 20, 200)


def test_key3_contract():
    assert check_key3(5, 9, 3)
    with pytest.raises(ValueError):
        check_key3(2, 9, 3)


def test_key4_modes():
    assert check_key4(24) is True
    assert check_key4(24, strict_integral=True) is None
    assert check_key4(26, strict_integral=True) is True
    lhs, rhs = key4_sides(26)
    assert lhs.denominator == 1 and rhs == comb(51, 26)


def test_min_f_small_values():
    res = min_f_abc(6)
    assert res["min"] == 421 == triangle_target(6)
    a, b, c = res["argmin"]
    assert a + b + c == 22 and f_abc(a, b, c, 6) == 421


def test_min_f_by_brute_force():
    for k in range(2, 9):
        total, top = 4 * k - 2, 2 * k - 1
        brute = min(
            f_abc(a, b, total - a - b, k)
            for a in range(top + 1)
            for b in range(top + 1)
            if 0 <= total - a - b <= top
        )
        assert min_f_abc(k)["min"] == brute


@pytest.mark.parametrize("k", [24, 37, 60])
def test_triangle_certificate(k):
    cert = triangle_lower_certificate(k)
    assert cert["holds"], [n for n, v in cert["checks"].items() if not v]
