"""Uniform set families on ``[n]`` stored as sorted bitmask tuples.

Vertex ``i`` of the 1-based notation used in JSON and in the constructions is
bit ``i - 1`` of an edge mask.  All functionals are exact.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

MAX_ENUM_N = 64
ENUMERATION_BUDGET = 2_000_000


class FamilyFormatError(ValueError):
    """Malformed family input (JSON or constructor arguments)."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> list[int]:
    """0-based positions of the set bits of ``x``, ascending."""
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def mask_of(vertices: Iterable[int], one_based: bool = True) -> int:
    off = 1 if one_based else 0
    m = 0
    for v in vertices:
        m |= 1 << (v - off)
    return m


@dataclass(frozen=True)
class Family:
    """A k-uniform family on ground set ``[n]``; edges strictly increasing."""

    n: int
    k: int
    edges: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise FamilyFormatError("n and k must be non-negative")
        if self.n > MAX_ENUM_N:
            raise FamilyFormatError(
                f"enumerated families are capped at {MAX_ENUM_N} vertices (n={self.n}); "
                "use a GeneratedFamily and the counting functions instead"
            )
        prev = -1
        top = 1 << self.n
        for e in self.edges:
            if e <= prev:
                raise FamilyFormatError("edges must be strictly increasing masks")
            if e >= top:
                raise FamilyFormatError(f"edge {sorted(v + 1 for v in bits(e))} exceeds n={self.n}")
            if popcount(e) != self.k:
                raise FamilyFormatError(
                    f"edge {sorted(v + 1 for v in bits(e))} has size {popcount(e)}, expected k={self.k}"
                )
            prev = e

    @classmethod
    def from_masks(cls, n: int, k: int, masks: Iterable[int]) -> "Family":
        return cls(n, k, tuple(sorted({int(m) for m in masks})))

    @classmethod
    def from_sets(cls, n: int, k: int, sets: Iterable[Iterable[int]], one_based: bool = True) -> "Family":
        return cls.from_masks(n, k, (mask_of(s, one_based) for s in sets))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, mask: int) -> bool:
        return mask in self._edge_set

    @cached_property
    def _edge_set(self) -> frozenset[int]:
        return frozenset(self.edges)

    @cached_property
    def masks(self) -> np.ndarray:
        return K.as_masks(self.edges)

    @cached_property
    def support(self) -> int:
        s = 0
        for e in self.edges:
            s |= e
        return s

    @property
    def support_size(self) -> int:
        return popcount(self.support)

    def sets(self, one_based: bool = True) -> list[tuple[int, ...]]:
        off = 1 if one_based else 0
        return [tuple(v + off for v in bits(e)) for e in self.edges]

    def relabel(self, perm: Sequence[int]) -> "Family":
        """Image under the 0-based vertex map ``v -> perm[v]``."""
        return Family.from_masks(self.n, self.k, (_apply(e, perm) for e in self.edges))

    def with_n(self, n: int) -> "Family":
        return Family(n, self.k, self.edges)

    def __repr__(self) -> str:
        return f"Family(n={self.n}, k={self.k}, |F|={len(self.edges)})"


def _apply(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for v in bits(mask):
        out |= 1 << perm[v]
    return out


@dataclass(frozen=True)
class SubsetQuery:
    """Selects the edges disjoint from ``avoid`` that contain ``require``."""

    avoid: int = 0
    require: int = 0

    def __post_init__(self):
        if self.avoid & self.require:
            raise ValueError("avoid and require must be disjoint")


@dataclass(frozen=True)
class FamilyStats:
    size: int
    delta: dict[int, int]
    gamma: dict[int, int]
    tau: int
    nu: int
    intersecting: bool
    saturated: bool | None
    transversal: tuple[int, ...] = ()
    basis: tuple[tuple[int, ...], ...] | None = None

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "delta": {str(k): v for k, v in sorted(self.delta.items())},
            "gamma": {str(k): v for k, v in sorted(self.gamma.items())},
            "tau": self.tau,
            "tau_witness": list(self.transversal),
            "nu": self.nu,
            "intersecting": self.intersecting,
            "saturated": self.saturated,
            "basis": None if self.basis is None else [list(b) for b in self.basis],
        }


# ---------------------------------------------------------------------------
# restriction, link, degrees


def restrict(fam: Family, q: SubsetQuery) -> Family:
    """Edges disjoint from ``q.avoid`` containing ``q.require``; ground set kept."""
    a, r = q.avoid, q.require
    return Family(fam.n, fam.k, tuple(e for e in fam.edges if not e & a and e & r == r))


def link(fam: Family, s: int) -> Family:
    """``{F - s : s <= F}`` as a ``(k - |s|)``-uniform family on the same ground set."""
    size = popcount(s)
    if size > fam.k:
        raise ValueError("link set larger than the uniformity")
    return Family.from_masks(fam.n, fam.k - size, (e & ~s for e in fam.edges if e & s == s))


def degree(fam: Family, s: int) -> int:
    return sum(1 for e in fam.edges if e & s == s)


def _subsets_of(mask: int, r: int) -> Iterable[int]:
    for combo in combinations(bits(mask), r):
        m = 0
        for v in combo:
            m |= 1 << v
        yield m


def max_degree(fam: Family, ell: int) -> int:
    """Largest link size over all ell-sets, counted through the edges' own ell-subsets."""
    if not 0 <= ell <= fam.k:
        raise ValueError(f"ell must lie in [0, k={fam.k}]")
    if not fam.edges:
        return 0
    if ell == 0:
        return len(fam.edges)
    counts: Counter[int] = Counter()
    for e in fam.edges:
        counts.update(_subsets_of(e, ell))
    return max(counts.values())


def degree_profile(fam: Family, ell: int) -> Counter:
    counts: Counter[int] = Counter()
    for e in fam.edges:
        counts.update(_subsets_of(e, ell))
    return counts


def _spread(compact: np.ndarray, support_bits: list[int]) -> np.ndarray:
    """Map masks over ``range(s)`` onto the actual support positions."""
    out = np.zeros(compact.shape[0], dtype=np.uint64)
    for b, v in enumerate(support_bits):
        out |= ((compact >> np.uint64(b)) & np.uint64(1)) << np.uint64(v)
    return out


def support_subsets(support: int, r: int) -> np.ndarray:
    """All r-subsets of the set bits of ``support`` as masks."""
    sb = bits(support)
    return _spread(K.ksubsets(len(sb), r), sb)


def diversity_witness(fam: Family, ell: int) -> tuple[int, int]:
    """``(gamma_ell, S)`` with S the first minimising ell-set found."""
    if ell < 0 or ell >= fam.n:
        raise ValueError(f"diversity needs 0 <= ell < n (ell={ell}, n={fam.n})")
    if not fam.edges:
        return 0, (1 << ell) - 1
    s = fam.support_size
    # vertices off the support are interchangeable and avoid no edge; a
    # superset of S avoids fewer edges, so only |S & support| = min(ell, s)
    # needs scanning
    inner = min(ell, s)
    cands = support_subsets(fam.support, inner)
    value, arg = K.min_count_avoiding(fam.masks, cands)
    S = int(cands[arg])
    outside = [v for v in range(fam.n) if not fam.support >> v & 1][: ell - inner]
    for v in outside:
        S |= 1 << v
    return value, S


def diversity(fam: Family, ell: int) -> int:
    return diversity_witness(fam, ell)[0]


# ---------------------------------------------------------------------------
# intersecting structure


def is_intersecting(fam: Family) -> bool:
    return K.all_intersect(fam.masks)


def minimum_transversal(fam: Family) -> tuple[int, int]:
    """``(tau, T)`` with T a minimum transversal mask; ``(0, 0)`` for no edges."""
    if not fam.edges:
        return 0, 0
    return K.min_transversal(fam.masks)


def covering_number(fam: Family) -> int:
    return minimum_transversal(fam)[0]


def has_small_transversal(masks: np.ndarray, t: int) -> bool:
    """True iff some transversal has fewer than ``t`` vertices."""
    if masks.shape[0] == 0:
        return t > 0
    size, _ = K.min_transversal(masks, t)
    return size < t


def matching_number(fam: Family) -> int:
    return K.max_matching(fam.masks)


def minimal_transversals(masks: Sequence[int], limit: int) -> list[int]:
    """All inclusion-minimal transversals with at most ``limit`` vertices."""
    masks = [int(m) for m in masks]
    if not masks:
        return [0]
    found: set[int] = set()

    def rec(chosen: int, forb: int) -> None:
        first = None
        for e in masks:
            if not e & chosen:
                if not e & ~forb:
                    return
                if first is None:
                    first = e
        if first is None:
            found.add(chosen)
            return
        if popcount(chosen) >= limit:
            return
        avail = first & ~forb
        tried = 0
        for v in bits(avail):
            b = 1 << v
            rec(chosen | b, forb | tried)
            tried |= b

    rec(0, 0)
    out = []
    for t in found:
        if all(any(e & t == (1 << v) for e in masks) for v in bits(t)):
            out.append(t)
    return sorted(out, key=lambda m: (popcount(m), m))


def basis(fam: Family) -> tuple[int, ...]:
    """Containment-minimal transversals of size at most k (mixed sizes)."""
    if not is_intersecting(fam):
        raise ValueError("basis is defined here for intersecting families only")
    return tuple(minimal_transversals(fam.edges, fam.k))


def up_closure(n: int, k: int, sets: Iterable[int]) -> Family:
    """``{H in C([n], k) : H contains some member of sets}`` by enumeration."""
    sets = [int(s) for s in sets]
    universe = K.ksubsets(n, k)
    keep = np.zeros(universe.shape[0], dtype=bool)
    for s in sets:
        su = np.uint64(s)
        keep |= (universe & su) == su
    return Family(n, k, tuple(int(x) for x in universe[keep]))


def _enumerable(n: int, k: int) -> bool:
    return n <= 63 and comb(n, k) <= ENUMERATION_BUDGET


def is_saturated(fam: Family) -> bool:
    """No k-subset of [n] can be added without creating a disjoint pair."""
    if not is_intersecting(fam):
        raise ValueError("saturation is defined for intersecting families")
    if not fam.edges:
        return comb(fam.n, fam.k) == 0
    if _enumerable(fam.n, fam.k):
        return K.first_addable(K.ksubsets(fam.n, fam.k), fam.masks) < 0
    # every k-set transversal contains a basis member; compare counts instead
    from .counting import count_up_closure

    return count_up_closure(fam.n, fam.k, basis(fam)) == len(fam.edges)


def saturate(fam: Family) -> Family:
    """Greedy completion in increasing mask order; input must be intersecting."""
    if not is_intersecting(fam):
        raise ValueError("only intersecting families can be saturated")
    if not _enumerable(fam.n, fam.k):
        raise ValueError(f"C({fam.n},{fam.k}) is beyond the enumeration budget")
    out = K.greedy_saturate(K.ksubsets(fam.n, fam.k), fam.masks)
    return Family.from_masks(fam.n, fam.k, (int(x) for x in out))


def family_stats(fam: Family, with_basis: bool = True) -> FamilyStats:
    inter = is_intersecting(fam)
    delta = {ell: max_degree(fam, ell) for ell in range(1, fam.k + 1)}
    top = max(2, fam.k)
    gamma = {ell: diversity(fam, ell) for ell in range(1, top) if ell < fam.n}
    tau, T = minimum_transversal(fam)
    sat = None
    bas = None
    if inter:
        if _enumerable(fam.n, fam.k) or fam.edges:
            sat = is_saturated(fam)
        if with_basis and fam.edges:
            bas = tuple(tuple(v + 1 for v in bits(b)) for b in basis(fam))
    return FamilyStats(
        size=len(fam.edges),
        delta=delta,
        gamma=gamma,
        tau=tau,
        nu=matching_number(fam) if fam.edges else 0,
        intersecting=inter,
        saturated=sat,
        transversal=tuple(v + 1 for v in bits(T)),
        basis=bas,
    )


# ---------------------------------------------------------------------------
# JSON


def family_to_json(fam: Family) -> dict:
    return {"n": fam.n, "k": fam.k, "edges": [list(s) for s in fam.sets()]}


def family_from_json(obj) -> Family:
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise FamilyFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise FamilyFormatError("family JSON must be an object with n, k, edges")
    try:
        n, k, edges = obj["n"], obj["k"], obj["edges"]
    except KeyError as exc:
        raise FamilyFormatError(f"missing field {exc}") from None
    if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool) or isinstance(k, bool):
        raise FamilyFormatError("n and k must be integers")
    if not isinstance(edges, list):
        raise FamilyFormatError("edges must be a list")
    masks = set()
    for i, edge in enumerate(edges):
        if not isinstance(edge, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in edge):
            raise FamilyFormatError(f"edge #{i} {edge!r} is not a list of integers")
        if len(set(edge)) != len(edge):
            raise FamilyFormatError(f"edge #{i} {edge!r} repeats a vertex")
        if any(v < 1 or v > n for v in edge):
            raise FamilyFormatError(f"edge #{i} {edge!r} has a vertex outside 1..{n}")
        if len(edge) != k:
            raise FamilyFormatError(f"edge #{i} {edge!r} has size {len(edge)}, expected k={k}")
        masks.add(mask_of(edge))
    return Family.from_masks(n, k, masks)
