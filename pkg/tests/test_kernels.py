"""Compiled kernels against their interpreted bodies and the numpy fallbacks."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divlab import _kernels as K
from divlab import constructions as C

needs_numba = pytest.mark.skipif(not K.NUMBA_ENABLED, reason="numba disabled")


def edge_arrays(max_n=10):
    return st.integers(3, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.integers(1, (1 << n) - 1), min_size=0, max_size=12, unique=True).map(
                lambda xs: K.as_masks(sorted(xs))
            ),
        )
    )


def test_ksubsets_order_and_count():
    subs = K.ksubsets(7, 3)
    assert subs.shape[0] == comb(7, 3)
    assert list(subs) == sorted(subs)
    assert all(bin(int(x)).count("1") == 3 for x in subs)


@settings(max_examples=150, deadline=None)
@given(edge_arrays())
def test_count_avoiding_backends_agree(args):
    n, edges = args
    subs = K.ksubsets(n, 2)
    expected = [sum(1 for e in edges if not int(e) & int(s)) for s in subs]
    assert list(K._count_avoiding_np(edges, subs)) == expected
    assert list(K._count_avoiding_nb(edges, subs)) == expected
    if edges.shape[0]:
        b, a = K.min_count_avoiding(edges, subs)
        assert b == min(expected) and expected[a] == b and a == expected.index(b)


@settings(max_examples=150, deadline=None)
@given(edge_arrays())
def test_intersect_backends_agree(args):
    _, edges = args
    assert bool(K._all_intersect_np(edges)) == bool(K._all_intersect_nb.py_func(edges))
    assert K.all_intersect(edges) == bool(K._all_intersect_np(edges))


@needs_numba
@settings(max_examples=100, deadline=None)
@given(edge_arrays(8))
def test_transversal_and_matching_jit_vs_python(args):
    _, edges = args
    if edges.shape[0] == 0:
        return
    assert tuple(K._min_transversal_nb(edges, 1 << 30)) == tuple(K._min_transversal_nb.py_func(edges, 1 << 30))
    assert K._max_matching_nb(edges) == K._max_matching_nb.py_func(edges)


@needs_numba
@pytest.mark.parametrize("name", ["fano", "t0", "triangle-pairs"])
def test_lexmin_jit_vs_python(name):
    fam = C.NAMED[name]()
    a = K._lexmin_nb(fam.masks, fam.support_size, False)
    b = K._lexmin_nb.py_func(fam.masks, fam.support_size, False)
    assert list(a[0]) == list(b[0]) and int(a[2]) == int(b[2])


@needs_numba
def test_child_filter_jit_vs_python():
    parent = K.as_masks([0b0000111])
    cands = K.ksubsets(7, 3)
    cands = cands[cands > parent[0]]
    cands = cands[(cands & parent[0]) != 0]
    subs = K.ksubsets(7, 2)
    for need, tau in [(0, 0), (1, 3), (2, 3)]:
        a = K._child_filter_nb(parent, cands, subs, need, tau, False)
        b = K._child_filter_nb.py_func(parent, cands, subs, need, tau, False)
        assert np.array_equal(a, b)


def test_saturation_kernels():
    u = K.ksubsets(7, 3)
    sat = K.greedy_saturate(u, C.fano().masks)
    assert list(sat) == list(C.fano().masks)
    assert K.first_addable(u, C.fano().masks) == -1


def _search_json(env_flag: str) -> str:
    env = dict(os.environ, DIVLAB_DISABLE_NUMBA=env_flag)
    code = (
        "import json; from divlab.search import SearchTask, run_search; "
        "from divlab import NUMBA_ENABLED; "
        "r = run_search(SearchTask(k=3, ell=2, n_max=7, tau_min=3)).to_json(); "
        "print(json.dumps({'numba': NUMBA_ENABLED, 'report': r}, sort_keys=True))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return out.stdout


def test_env_flag_selects_fallback_with_identical_output():
    fast = json.loads(_search_json("0"))
    slow = json.loads(_search_json("1"))
    assert slow["numba"] is False
    assert fast["report"] == slow["report"]
