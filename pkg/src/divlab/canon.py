"""Canonical forms and isomorphism tests for uniform families.

The canonical form of a family is the lexicographically smallest sorted list of
edge masks over all relabelings of its support onto ``0..s-1``.  Isolated
vertices are ignored, so families that differ only in ``n`` compare equal.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .family import Family, bits


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Byte encoding: support size, uniformity, then each edge as 8 big-endian bytes."""

    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, text: str) -> "CanonicalForm":
        return cls(bytes.fromhex(text))

    @property
    def support_size(self) -> int:
        return self.data[0]

    @property
    def k(self) -> int:
        return self.data[1]

    def masks(self) -> list[int]:
        body = self.data[2:]
        return [int.from_bytes(body[i : i + 8], "big") for i in range(0, len(body), 8)]

    def family(self, n: int | None = None) -> Family:
        s = self.support_size
        return Family(s if n is None else n, self.k, tuple(self.masks()))

    def __str__(self) -> str:
        return self.hex()


def encode(s: int, k: int, masks) -> CanonicalForm:
    head = bytes([s, k])
    return CanonicalForm(head + b"".join(int(m).to_bytes(8, "big") for m in masks))


def compress(fam: Family) -> tuple[np.ndarray, list[int]]:
    """Edge masks over ``range(s)`` and the support vertices in label order."""
    sup = bits(fam.support)
    pos = {v: i for i, v in enumerate(sup)}
    out = []
    for e in fam.edges:
        m = 0
        for v in bits(e):
            m |= 1 << pos[v]
        out.append(m)
    return K.as_masks(sorted(out)), sup


@dataclass(frozen=True)
class Canonization:
    form: CanonicalForm
    labeling: dict[int, int]  # 0-based original vertex -> canonical label
    automorphisms: int


def canonize(fam: Family) -> Canonization:
    masks, sup = compress(fam)
    s = len(sup)
    if masks.shape[0] == 0:
        return Canonization(encode(0, fam.k, []), {}, 1)
    best, perm, aut, _ = K.lexmin(masks, s, False)
    labeling = {sup[int(perm[j])]: j for j in range(s)}
    return Canonization(encode(s, fam.k, best), labeling, int(aut))


def canonical_form(fam: Family) -> CanonicalForm:
    return canonize(fam).form


def canonical_labeling(fam: Family) -> dict[int, int]:
    return canonize(fam).labeling


def automorphism_count(fam: Family) -> int:
    """Number of support permutations fixing the edge set."""
    return canonize(fam).automorphisms


def is_canonical(fam: Family) -> bool:
    """True when the family on support ``0..s-1`` already equals its canonical form."""
    s = fam.support_size
    if fam.support != (1 << s) - 1:
        return False
    if not fam.edges:
        return True
    return bool(K.lexmin(fam.masks, s, True)[3])


def vertex_invariants(fam: Family) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Per support vertex: degree and the sorted co-degrees with its neighbours."""
    deg: Counter[int] = Counter()
    co: dict[int, Counter[int]] = {}
    for e in fam.edges:
        vs = bits(e)
        for v in vs:
            deg[v] += 1
            row = co.setdefault(v, Counter())
            for w in vs:
                if w != v:
                    row[w] += 1
    return {v: (deg[v], tuple(sorted(co[v].values()))) for v in deg}


def invariant_key(fam: Family) -> tuple:
    inv = vertex_invariants(fam)
    return (fam.k, fam.support_size, len(fam.edges), tuple(sorted(inv.values())))


def is_isomorphic(a: Family, b: Family) -> bool:
    if a.k != b.k or len(a.edges) != len(b.edges) or a.support_size != b.support_size:
        return False
    if invariant_key(a) != invariant_key(b):
        return False
    return canonical_form(a) == canonical_form(b)
