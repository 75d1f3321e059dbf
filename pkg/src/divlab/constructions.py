"""Named intersecting families and the generated/wreath operators.

Vertex labels follow ``data/labelings.json``; everything here is 1-based at
the interface and bit ``v - 1`` internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations, product
from math import comb
from typing import Iterable

import numpy as np

from . import _kernels as K
from .family import ENUMERATION_BUDGET, MAX_ENUM_N, Family, FamilyFormatError, bits, popcount


class GroundSetTooLarge(ValueError):
    """Raised when a construction would need more than 64 vertices."""


@lru_cache(maxsize=None)
def labelings() -> dict:
    with resources.files("divlab").joinpath("data/labelings.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def _listed(name: str, n: int, k: int) -> Family:
    return Family.from_sets(n, k, labelings()[name]["edges"])


def fano() -> Family:
    return _listed("fano", 7, 3)


def t0() -> Family:
    return _listed("t0", 6, 3)


def l3() -> Family:
    diff = labelings()["l3"]["difference_set"]
    return Family.from_sets(13, 4, ([(i + d) % 13 for d in diff] for i in range(13)), one_based=False)


def complete(n: int, k: int) -> Family:
    """All k-subsets of [n]."""
    return Family(n, k, tuple(int(x) for x in K.ksubsets(n, k)))


def star(n: int, k: int, x: int = 1) -> Family:
    b = 1 << (x - 1)
    return Family(n, k, tuple(int(e) for e in K.ksubsets(n, k) if int(e) & b))


# ---------------------------------------------------------------------------
# generated families


@dataclass(frozen=True)
class GeneratedFamily:
    """``{F in C([n], k) : F contains some generator}``; ``n`` may exceed 64."""

    n: int
    k: int
    generators: tuple[int, ...]

    def __post_init__(self):
        for g in self.generators:
            if g >> 64:
                raise FamilyFormatError("generators must live on the first 64 vertices")
            if popcount(g) > self.k:
                raise FamilyFormatError(
                    f"generator {sorted(v + 1 for v in bits(g))} is larger than k={self.k}"
                )
        if self.support.bit_length() > self.n:
            raise FamilyFormatError(f"generators need at least {self.support.bit_length()} vertices")

    @property
    def support(self) -> int:
        s = 0
        for g in self.generators:
            s |= g
        return s

    def size(self) -> int:
        from .counting import count_generated_avoiding

        return count_generated_avoiding(self, 0)

    def enumerable(self, budget: int = ENUMERATION_BUDGET) -> bool:
        return self.n <= min(MAX_ENUM_N - 1, 63) and comb(self.n, self.k) <= budget

    def enumerate(self, budget: int = ENUMERATION_BUDGET) -> Family:
        if not self.enumerable(budget):
            raise GroundSetTooLarge(
                f"C({self.n},{self.k}) exceeds the enumeration budget; use the counting functions"
            )
        universe = K.ksubsets(self.n, self.k)
        keep = np.zeros(universe.shape[0], dtype=bool)
        for g in self.generators:
            gu = np.uint64(g)
            keep |= (universe & gu) == gu
        return Family(self.n, self.k, tuple(int(x) for x in universe[keep]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "generators": [[v + 1 for v in bits(g)] for g in self.generators],
        }


def generated(gen: Family | Iterable[int], n: int, k: int) -> GeneratedFamily:
    masks = gen.edges if isinstance(gen, Family) else tuple(int(g) for g in gen)
    return GeneratedFamily(n, k, tuple(sorted(set(masks))))


# ---------------------------------------------------------------------------
# wreath product


def wreath(a: Family, b: Family) -> Family:
    """One ``a``-edge in copy ``i`` for every vertex ``i`` of a ``b``-edge, united.

    Copy ``i`` of ``a``'s ground set occupies vertices ``i*a.n .. (i+1)*a.n - 1``.
    """
    n = a.n * b.n
    if n > MAX_ENUM_N:
        raise GroundSetTooLarge(
            f"wreath product needs {n} > {MAX_ENUM_N} vertices; evaluate it with the counting module"
        )
    out = []
    for be in b.edges:
        parts = [[e << (i * a.n) for e in a.edges] for i in bits(be)]
        for pick in product(*parts):
            m = 0
            for p in pick:
                m |= p
            out.append(m)
    return Family.from_masks(n, a.k * b.k, out)


# ---------------------------------------------------------------------------
# fixed examples


def parity_blocks() -> Family:
    lab = labelings()["parity_blocks"]["vertices"]
    X = [(lab[f"{c}0"], lab[f"{c}1"]) for c in "abcd"]
    E = [lab["e0"], lab["e1"], lab["e2"]]
    H = [set(x) | set(y) for x in X for y in combinations(E, 2)]
    G = [
        {lab[f"a{i}"], lab[f"b{j}"], lab[f"c{c}"], lab[f"d{d}"]}
        for i, j, c, d in product((0, 1), repeat=4)
        if (i + j + c) % 2 == 1
    ]
    return Family.from_sets(11, 4, H + G)


def triangle_pairs() -> Family:
    lab = labelings()["triangle_pairs"]["vertices"]
    U = [[lab[f"u{g}_{x}"] for x in range(3)] for g in (1, 2, 3)]
    edges = [
        set(p) | set(q)
        for i, j in combinations(range(3), 2)
        for p in combinations(U[i], 2)
        for q in combinations(U[j], 2)
    ]
    return Family.from_sets(9, 4, edges)


def _pentagon(labels: list[int]) -> list[set[int]]:
    return [{labels[i], labels[(i + 1) % 5]} for i in range(5)]


def _r_triples(labels: list[int]) -> list[set[int]]:
    return [{labels[i], labels[(i + 1) % 5], labels[(i + 3) % 5]} for i in range(5)]


def pentagon_bridge(shift: int = 0) -> Family:
    """``shift`` rotates the y-indices, giving isomorphic relabelings."""
    lab = labelings()["pentagon_bridge"]["vertices"]
    X = [lab[f"x{i}"] for i in range(3)]
    Y = [lab[f"y{(i + shift) % 5}"] for i in range(5)]
    Z = [lab["z0"], lab["z1"]]
    A = [set(p) for p in combinations(X, 2)]
    edges = [a | b for a in A for b in _pentagon(Y)]
    edges += [a | set(Z) for a in A]
    edges += [c | {z} for c in _r_triples(Y) for z in Z]
    return Family.from_sets(10, 4, edges)


def pentagon_cycle() -> Family:
    copies = [[5 * j + i + 1 for i in range(5)] for j in range(3)]
    edges = [
        p | r
        for j in range(3)
        for p in _pentagon(copies[j])
        for r in _r_triples(copies[(j + 1) % 3])
    ]
    return Family.from_sets(15, 5, edges)


def triangle() -> Family:
    return complete(3, 2)


def t0_triangle() -> Family:
    return wreath(t0(), triangle())


def ekr_triangle(k: int) -> Family:
    if k < 1:
        raise ValueError("k must be positive")
    if 3 * (2 * k - 1) > MAX_ENUM_N:
        raise GroundSetTooLarge(f"ekr_triangle({k}) needs {3 * (2 * k - 1)} vertices; use min_f_abc")
    return wreath(complete(2 * k - 1, k), triangle())


NAMED = {
    "fano": fano,
    "t0": t0,
    "l3": l3,
    "parity-blocks": parity_blocks,
    "triangle-pairs": triangle_pairs,
    "pentagon-bridge": pentagon_bridge,
    "pentagon-cycle": pentagon_cycle,
    "t0-triangle": t0_triangle,
    "triangle": triangle,
}

GENERATORS = {"fano": fano, "t0": t0, "l3": l3}


def build(name: str, n: int | None = None, k: int | None = None) -> Family | GeneratedFamily:
    """Dispatch used by the CLI; ``generated-<base>`` needs ``n`` and ``k``."""
    if name.startswith("generated-"):
        base = name[len("generated-"):]
        if base not in GENERATORS or n is None or k is None:
            raise KeyError(name)
        return generated(GENERATORS[base](), n, k)
    if name == "ekr-triangle":
        if k is None:
            raise KeyError(name)
        return ekr_triangle(k)
    if name == "complete":
        if n is None or k is None:
            raise KeyError(name)
        return complete(n, k)
    return NAMED[name]()

