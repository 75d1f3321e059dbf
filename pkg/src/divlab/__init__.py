"""Exact workbench for intersecting uniform set families and their diversity."""

from __future__ import annotations

from ._accel import NUMBA_ENABLED
from .canon import CanonicalForm, automorphism_count, canonical_form, is_isomorphic
from .family import (
    Family,
    FamilyFormatError,
    FamilyStats,
    SubsetQuery,
    basis,
    covering_number,
    diversity,
    family_from_json,
    family_stats,
    family_to_json,
    is_intersecting,
    is_saturated,
    link,
    matching_number,
    max_degree,
    restrict,
    saturate,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "CanonicalForm",
    "Family",
    "FamilyFormatError",
    "FamilyStats",
    "SubsetQuery",
    "automorphism_count",
    "basis",
    "canonical_form",
    "covering_number",
    "diversity",
    "family_from_json",
    "family_stats",
    "family_to_json",
    "is_intersecting",
    "is_isomorphic",
    "is_saturated",
    "link",
    "matching_number",
    "max_degree",
    "restrict",
    "saturate",
]
