"""Exact counting: binomials, inclusion-exclusion over generators, bound formulas.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import TYPE_CHECKING, Iterable

from .family import bits, popcount

if TYPE_CHECKING:
    from .constructions import GeneratedFamily


def binom(m: int, r: int) -> int:
    """C(m, r), zero outside ``0 <= r <= m``."""
    if r < 0 or m < 0 or r > m:
        return 0
    return comb(m, r)


def gen_binom(x: Fraction | int, r: int) -> Fraction:
    """Generalized binomial x(x-1)...(x-r+1)/r! for rational x and integer r >= 0."""
    if r < 0:
        return Fraction(0)
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(binom(int(x), r))
    num = Fraction(1)
    for i in range(r):
        num *= x - i
    return num / factorial(r)


# ---------------------------------------------------------------------------
# inclusion-exclusion


def _union_coefficients(generators: Iterable[int], k: int) -> dict[int, int]:
    """Signed inclusion-exclusion weights keyed by union mask, unions above k dropped.

    A union larger than k contributes nothing and only grows further, so the
    whole branch is pruned.
    """
    coef: dict[int, int] = {}
    for g in generators:
        if popcount(g) > k:
            continue
        upd: dict[int, int] = {g: 1}
        for u, c in coef.items():
            w = u | g
            if popcount(w) <= k:
                upd[w] = upd.get(w, 0) - c
        for u, c in upd.items():
            coef[u] = coef.get(u, 0) + c
    return {u: c for u, c in coef.items() if c}


def count_up_closure(n: int, k: int, generators: Iterable[int], avoid: int = 0, extra_avoid: int = 0) -> int:
    """Number of k-subsets of [n] disjoint from ``avoid`` containing some generator.

    ``extra_avoid`` removes that many further vertices lying outside every
    generator (they are interchangeable, so only their number matters).
    """
    gens = [g for g in generators if not g & avoid]
    free = n - popcount(avoid) - extra_avoid
    total = 0
    for u, c in _union_coefficients(gens, k).items():
        s = popcount(u)
        total += c * binom(free - s, k - s)
    return total


def count_generated_avoiding(gf: "GeneratedFamily", avoid: int | Iterable[int]) -> int:
    """|F_E(avoid-bar)| for a generated family; ``avoid`` is a mask or 1-based vertices."""
    if not isinstance(avoid, int):
        m = 0
        for v in avoid:
            m |= 1 << (v - 1)
        avoid = m
    if avoid >> gf.n:
        raise ValueError("avoid set exceeds the ground set")
    return count_up_closure(gf.n, gf.k, gf.generators, avoid)


def generated_diversity_witness(gf: "GeneratedFamily", ell: int) -> tuple[int, int]:
    """``(gamma_ell, S)``; S is built from the support first, then outside vertices."""
    if ell < 0 or ell > gf.n:
        raise ValueError("need 0 <= ell <= n")
    sup = bits(gf.support)
    inner = min(ell, len(sup))
    extra = ell - inner
    best = None
    arg = 0
    for combo in combinations(sup, inner):
        S = 0
        for v in combo:
            S |= 1 << v
        val = count_up_closure(gf.n, gf.k, gf.generators, S, extra)
        if best is None or val < best:
            best, arg = val, S
    outside = [v for v in range(gf.n) if not gf.support >> v & 1][:extra]
    for v in outside:
        arg |= 1 << v
    return best, arg


def generated_diversity(gf: "GeneratedFamily", ell: int) -> int:
    return generated_diversity_witness(gf, ell)[0]


# ---------------------------------------------------------------------------
# closed forms


def fano_gamma2(n: int, k: int) -> int:
    return 2 * binom(n - 5, k - 3) - binom(n - 7, k - 5)


def t0_gamma2(n: int, k: int) -> int:
    return 2 * binom(n - 5, k - 3) - binom(n - 6, k - 4)


def l3_gamma3(n: int, k: int) -> int:
    return 3 * binom(n - 7, k - 4) - 3 * binom(n - 10, k - 7) + binom(n - 13, k - 10)


# ---------------------------------------------------------------------------
# bound evaluators


@dataclass(frozen=True)
class BoundSpec:
    """Parameters of the upper bounds; ``m_value`` is m_ell(ell+1) with its provenance."""

    ell: int
    k: int
    n: int
    m_value: int
    m_source: str = field(default="caller-supplied")

    def __post_init__(self):
        if not 0 < self.ell < self.k:
            raise ValueError("need 0 < ell < k")
        if self.m_value <= 0:
            raise ValueError("m_value must be positive")

    @property
    def threshold_factor(self) -> Fraction:
        """n must be at least this times k^2."""
        ell = self.ell
        return Fraction((ell + 2) * (ell + 1) ** ell - (ell + 1) * ell**ell, self.m_value)

    @property
    def hypothesis_holds(self) -> bool:
        return self.ell >= 2 and self.n >= self.threshold_factor * self.k**2


def _tail(spec: BoundSpec, lead: int, factor: int) -> int:
    n, k, ell = spec.n, spec.k, spec.ell
    return lead * binom(n - 2 * ell - 1, k - ell - 1) + factor * k * binom(n - 2 * ell - 2, k - ell - 2)


def theorem_bounds(spec: BoundSpec) -> dict:
    """Exact right-hand sides of the diversity upper bounds for the given parameters."""
    n, k, ell = spec.n, spec.k, spec.ell
    generic = (ell + 1) * ell**ell
    out = {
        "main": _tail(spec, spec.m_value, generic),
        "reduced": _tail(spec, spec.m_value - 1, generic),
        "case1": (ell + 2) * (ell + 1) ** ell * k * binom(n - 2 * ell - 2, k - ell - 2),
        "triple_level": 3 * binom(n - 7, k - 4) + 108 * k * binom(n - 8, k - 5),
        "triple_level_generic": 3 * binom(n - 7, k - 4) + 4 * 3**3 * k * binom(n - 8, k - 5),
        "pair_level_exact": fano_gamma2(n, k),
        "degree_constant": 2 * ell ** (ell - 3) if ell >= 3 else None,
        "threshold_factor": spec.threshold_factor,
        "hypothesis_holds": spec.hypothesis_holds,
        "m_source": spec.m_source,
    }
    return out


def bounds_monotone_in_n(ell: int, k: int, m_value: int, n_lo: int, n_hi: int) -> bool:
    prev = None
    for n in range(n_lo, n_hi + 1):
        b = theorem_bounds(BoundSpec(ell, k, n, m_value))
        cur = (b["main"], b["reduced"], b["case1"], b["triple_level"])
        if prev is not None and any(c < p for c, p in zip(cur, prev)):
            return False
        prev = cur
    return True


# ---------------------------------------------------------------------------
# binomial product inequalities


@lru_cache(maxsize=None)
def _comb_row(k: int, top: int) -> tuple[int, ...]:
    return tuple(binom(m, k) for m in range(top + 2))


def check_key3(p: int, q: int, k: int) -> bool:
    """C(p,k)C(q,k) > C(p-1,k)C(q+1,k) for k <= p <= q."""
    if not k <= p <= q:
        raise ValueError("need k <= p <= q")
    return binom(p, k) * binom(q, k) > binom(p - 1, k) * binom(q + 1, k)


def check_key3_range(k_lo: int, top: int) -> tuple[bool, int, tuple | None]:
    """Scan all k_lo <= k <= p <= q <= top; returns (all hold, count, first failure)."""
    count = 0
    for k in range(k_lo, top + 1):
        row = _comb_row(k, top)
        for p in range(k, top + 1):
            cp, cp1 = row[p], row[p - 1]
            for q in range(p, top + 1):
                count += 1
                if not cp * row[q] > cp1 * row[q + 1]:
                    return False, count, (p, q, k)
    return True, count, None


def key4_sides(k: int) -> tuple[Fraction, Fraction]:
    lhs = gen_binom(Fraction(4 * k + 1, 3), k) * gen_binom(Fraction(4 * k - 5, 3), k)
    return lhs, Fraction(binom(2 * k - 1, k))


def check_key4(k: int, strict_integral: bool = False) -> bool | None:
    """C((4k+1)/3, k) C((4k-5)/3, k) > C(2k-1, k).

    Non-integral upper arguments use the generalized binomial polynomial;
    with ``strict_integral`` such k report ``None`` instead.
    """
    if strict_integral and k % 3 != 2:
        return None
    lhs, rhs = key4_sides(k)
    return lhs > rhs


# ---------------------------------------------------------------------------
# three-part minimisation


def f_abc(a: int, b: int, c: int, k: int) -> int:
    A, B, C = binom(a, k), binom(b, k), binom(c, k)
    return A * B + A * C + B * C


def min_f_abc(k: int) -> dict:
    """Minimum of f over a+b+c = 4k-2 with 0 <= a <= b <= c <= 2k-1."""
    if k < 1:
        raise ValueError("k must be positive")
    total = 4 * k - 2
    top = 2 * k - 1
    best = None
    arg = None
    for a in range(0, total // 3 + 1):
        for b in range(a, (total - a) // 2 + 1):
            c = total - a - b
            if c > top or c < b:
                continue
            v = f_abc(a, b, c, k)
            if best is None or v < best:
                best, arg = v, (a, b, c)
    return {"min": best, "argmin": arg}


def triangle_target(k: int) -> int:
    return 2 * binom(2 * k - 2, k) + 1


def _h_equal(x: Fraction, k: int) -> Fraction:
    return 8 * x * x + (19 - 23 * k) * x + 16 * k * k - 27 * k + 11


def _h_unequal(x: Fraction, k: int) -> Fraction:
    return 8 * x * x + (13 - 23 * k) * x + 16 * k * k - 19 * k + 5


def triangle_lower_certificate(k: int) -> dict:
    """Every inequality the case analysis for min f >= 2C(2k-2,k)+1 relies on, checked exactly.

    The unimodality argument needs, for each of the two cases, a quadratic
    that is positive at x = k, negative at the right end of the range and
    whose vertex lies past that end.
    """
    target = triangle_target(k)
    checks: dict[str, bool] = {}
    checks["key4"] = bool(check_key4(k))
    checks["ekr_end_dominates"] = binom(2 * k - 1, k) >= target
    # a = k-1: C(b,k)C(c,k) with b+c = 3k-1 only grows as b moves toward c
    checks["key3_chain_low"] = all(
        check_key3(p, 3 * k - 1 - p, k) for p in range(k + 1, (3 * k - 1) // 2 + 1)
    )
    # Case 2 swaps (b, c) -> (b-1, c+1) repeatedly, each step one key3 instance
    checks["key3_case2"] = all(
        check_key3(p, q, k)
        for a in range(k, (4 * k - 2) // 3 + 1)
        for p in range(a + 2, (4 * k - 2 - a) // 2 + 1)
        for q in [4 * k - 2 - a - p]
        if p <= q
    )
    right_eq = Fraction(4 * k - 2, 3)
    right_ne = Fraction(4 * k + 1, 3)
    checks["equal_case_start_positive"] = _h_equal(Fraction(k), k) > 0
    checks["equal_case_end_negative"] = _h_equal(right_eq, k) < 0
    checks["equal_case_vertex_right"] = Fraction(23 * k - 19, 16) >= right_eq
    checks["unequal_case_start_positive"] = _h_unequal(Fraction(k), k) > 0
    checks["unequal_case_end_negative"] = _h_unequal(right_ne, k) < 0
    checks["unequal_case_vertex_right"] = Fraction(23 * k - 13, 16) >= right_ne
    # squared middle term dominates the key4 product (one real-argument key3 step)
    mid = gen_binom(right_eq, k)
    checks["middle_square"] = mid * mid >= gen_binom(right_ne, k) * gen_binom(Fraction(4 * k - 5, 3), k)
    scan = min_f_abc(k)
    checks["scan_agrees"] = scan["min"] >= target
    return {"k": k, "target": target, "checks": checks, "holds": all(checks.values()), "scan": scan}
