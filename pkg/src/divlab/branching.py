"""Weighted branching certificates for saturated intersecting families.

Given the basis (minimal transversals of size at most k) of a saturated
family, a set U of ell vertices is chosen and the weighted count of basis
members avoiding U is compared against (t-1) r (r-1)^(ell-1).  A second
certificate bounds the pair-avoiding counts by 24 when t = 4.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .family import (
    Family,
    basis,
    bits,
    covering_number,
    has_small_transversal,
    is_intersecting,
    is_saturated,
    popcount,
    up_closure,
)
from . import _kernels as K


class NotApplicable(ValueError):
    """Preconditions of a certificate fail (reported, not a violation)."""


@dataclass
class BranchingCertificate:
    t: int
    r: int
    ell: int
    k: int
    U: tuple[int, ...]
    case: str
    per_level: dict[int, int]
    weighted_sum: Fraction
    weighted_sum_int: tuple[int, int]
    bound: int
    holds: bool
    sums_agree: bool
    trace: dict | None = None

    def to_json(self) -> dict:
        out = {
            "t": self.t,
            "r": self.r,
            "ell": self.ell,
            "k": self.k,
            "U": list(self.U),
            "case": self.case,
            "per_level": {str(j): v for j, v in sorted(self.per_level.items())},
            "weighted_sum": str(self.weighted_sum),
            "weighted_sum_int": {"numerator": str(self.weighted_sum_int[0]), "denominator": str(self.weighted_sum_int[1])},
            "bound": str(self.bound),
            "holds": self.holds,
            "sums_agree": self.sums_agree,
            "tie_break": "lexicographically smallest U among minimisers",
        }
        if self.trace is not None:
            out["trace"] = self.trace
        return out


@dataclass
class PairCertificate:
    applicable: bool
    reason: str = ""
    bound: int = 24
    pairs: list[dict] = field(default_factory=list)
    holds: bool = True
    worst: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "bound": self.bound,
            "pairs_checked": len(self.pairs),
            "worst": None if self.worst is None else str(self.worst),
            "holds": self.holds,
            "pairs": self.pairs,
        }


# ---------------------------------------------------------------------------
# helpers


@dataclass(frozen=True)
class _Setup:
    fam: Family
    basis: tuple[int, ...]
    t: int


def prepare(fam: Family) -> _Setup:
    """Checks intersecting, saturated and basis closure; raises otherwise."""
    if not fam.edges:
        raise NotApplicable("empty family")
    if not is_intersecting(fam):
        raise ValueError("family is not intersecting")
    if not is_saturated(fam):
        raise ValueError("family is not saturated; saturate it first")
    B = basis(fam)
    if up_closure(fam.n, fam.k, B).edges != fam.edges:
        raise ValueError("basis up-closure does not reproduce the family")
    return _Setup(fam, B, covering_number(fam))


def _level(B, j: int) -> list[int]:
    return [b for b in B if popcount(b) == j]


def _upto(B, j: int) -> list[int]:
    return [b for b in B if popcount(b) <= j]


def _tau_at_least(masks: list[int], need: int) -> bool:
    if not masks:
        return need <= 0
    return not has_small_transversal(K.as_masks(masks), need)


def _avoiding(masks: list[int], U: int) -> int:
    return sum(1 for b in masks if not b & U)


def _mask_of(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _one_based(mask: int) -> tuple[int, ...]:
    return tuple(v + 1 for v in bits(mask))


# ---------------------------------------------------------------------------
# U selection and the main certificate


def select_u(fam: Family, ell: int, _setup: _Setup | None = None) -> tuple[tuple[int, ...], str, int, int]:
    """``(U, case, r, t)`` with U 1-based; raises for invalid input."""
    st = _setup or prepare(fam)
    t = st.t
    if t < ell + 1:
        raise NotApplicable(f"covering number {t} is below ell+1={ell + 1}")
    if ell < 1 or ell >= fam.k:
        raise NotApplicable("need 1 <= ell < k")
    B = st.basis
    r = None
    for j in range(t, fam.k + 1):
        if _tau_at_least(_upto(B, j), ell + 1):
            r = j
            break
    if r is None:
        raise NotApplicable("no level r with covering number of the truncated basis above ell")
    low = _upto(B, r - 1)
    top = _level(B, r)
    best = None
    bestU = None
    for combo in combinations(range(fam.n), ell):
        U = _mask_of(combo)
        if r > t and any(not b & U for b in low):
            continue
        v = _avoiding(top, U)
        if best is None or v < best:
            best, bestU = v, U
    if bestU is None:
        raise RuntimeError("no admissible U although the truncated basis has a small transversal")
    return _one_based(bestU), ("i" if r > t else "ii"), r, t


def verify_branching(fam: Family, ell: int, trace: bool = False) -> BranchingCertificate:
    st = prepare(fam)
    U1, case, r, t = select_u(fam, ell, st)
    U = _mask_of(v - 1 for v in U1)
    k = fam.k
    per_level = {j: _avoiding(_level(st.basis, j), U) for j in range(r, k + 1)}
    ws = sum((Fraction(c, k ** (j - ell - 1)) for j, c in per_level.items()), Fraction(0))
    den = k ** (k - ell - 1)
    num = sum(c * k ** (k - j) for j, c in per_level.items())
    bound = (t - 1) * r * (r - 1) ** (ell - 1)
    cert = BranchingCertificate(
        t=t,
        r=r,
        ell=ell,
        k=k,
        U=U1,
        case=case,
        per_level=per_level,
        weighted_sum=ws,
        weighted_sum_int=(num, den),
        bound=bound,
        holds=ws <= bound,
        sums_agree=Fraction(num, den) == ws,
    )
    if trace:
        cert.trace = simulate_process(st, U, r, ell)
    return cert


def admissible_ells(fam: Family) -> list[int]:
    t = covering_number(fam)
    return [ell for ell in range(1, fam.k) if t >= ell + 1]


# ---------------------------------------------------------------------------
# sequence process (debug trace)


def simulate_process(st: _Setup, U: int, r: int, ell: int, limit: int = 200_000) -> dict:
    """Runs the weighted sequence expansion with first-fit choices.

    Reports the total surviving weight, whether every basis member of size
    j >= r avoiding U appears as a surviving sequence, and whether each
    surviving weight respects the per-length lower bound the inequality uses.
    """
    fam, B, t = st.fam, st.basis, st.t
    k = fam.k
    edges = set(fam.edges)
    upto_r = _upto(B, r)
    notes: list[str] = []
    first = next((b for b in _level(B, t) if b & U), None)
    if first is None:
        return {"ran": False, "reason": "no minimum-size basis member meets U"}
    if not first & (1 << min(bits(U))):
        notes.append("first basis member meets U but not its smallest vertex")
    part = first & ~U
    seqs = deque((((v,), Fraction(1, popcount(part))) for v in bits(part)))
    survivors: list[tuple[tuple[int, ...], Fraction]] = []
    discarded = Fraction(0)
    steps = 0
    while seqs:
        steps += 1
        if steps > limit:
            return {"ran": False, "reason": f"more than {limit} expansion steps"}
        S, w = seqs.popleft()
        Sm = _mask_of(S)
        p = len(S)
        if p < ell:
            choice = next((b for b in upto_r if not b & Sm and b & U), None)
            if choice is None:
                notes.append(f"stage {p + 1}: no basis member meets U and avoids {list(_one_based(Sm))}")
                choice = next((b for b in upto_r if not b & Sm), None)
        elif p == ell:
            choice = next((b for b in upto_r if not b & Sm), None)
        else:
            choice = next((b for b in B if not b & Sm), None)
            if choice is None:
                survivors.append((S, w))
                continue
            if p >= k:
                if Sm not in edges:
                    discarded += w
                    continue
        if choice is None:
            survivors.append((S, w))
            continue
        ext = choice & ~U
        share = Fraction(1, popcount(ext))
        for y in bits(ext):
            seqs.append((S + (y,), w * share))
    total = sum((w for _, w in survivors), Fraction(0))
    sets_by_len: dict[int, set[int]] = {}
    for S, _ in survivors:
        sets_by_len.setdefault(len(S), set()).add(_mask_of(S))
    missing = [
        list(_one_based(b))
        for b in B
        if popcount(b) >= r and not b & U and b not in sets_by_len.get(popcount(b), set())
    ]
    floor_ok = all(
        w >= Fraction(1, r * (t - 1) * (r - 1) ** (ell - 1) * k ** max(0, len(S) - ell - 1))
        for S, w in survivors
        if len(S) >= ell + 1
    )
    return {
        "ran": True,
        "survivors": len(survivors),
        "total_weight": str(total),
        "discarded_weight": str(discarded),
        "weight_at_most_one": total <= 1,
        "all_avoiding_members_reached": not missing,
        "missing": missing,
        "weight_floor_respected": floor_ok,
        "notes": notes,
    }


# ---------------------------------------------------------------------------
# pair certificate for covering number four


def verify_pair_branching(fam: Family) -> PairCertificate:
    """Checks sum_{4<=j<=k} |B^(j)(V-bar)| / k^(j-3) <= 24 for all pairs V inside 4-element basis members."""
    try:
        st = prepare(fam)
    except NotApplicable as exc:
        return PairCertificate(False, str(exc))
    except ValueError as exc:
        return PairCertificate(False, str(exc))
    if st.t != 4:
        return PairCertificate(False, f"covering number is {st.t}, not 4")
    four = _level(st.basis, 4)
    if not _tau_at_least(four, 3):
        return PairCertificate(False, "4-element basis members have a transversal of size 2")
    k = fam.k
    cert = PairCertificate(True)
    seen = set()
    for b1 in four:
        for pair in combinations(bits(b1), 2):
            V = _mask_of(pair)
            if V in seen:
                continue
            seen.add(V)
            levels = {j: _avoiding(_level(st.basis, j), V) for j in range(4, k + 1)}
            s = sum((Fraction(c, k ** (j - 3)) for j, c in levels.items()), Fraction(0))
            ok = s <= cert.bound
            cert.pairs.append({"V": list(_one_based(V)), "sum": str(s), "holds": ok})
            cert.holds = cert.holds and ok
            if cert.worst is None or s > cert.worst:
                cert.worst = s
    return cert


# name used by the public interface contract
verify_branching_33 = verify_pair_branching
