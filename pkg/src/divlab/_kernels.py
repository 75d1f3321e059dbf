"""Hot loops over uint64 edge masks.

Every public helper here dispatches either to an ``@jit`` kernel or, with
numba disabled, to a numpy-vectorised equivalent.  Backtracking kernels have no
vectorised form; without numba they run as plain Python through the same
source.
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, jit

U64 = np.uint64
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


def as_masks(edges) -> np.ndarray:
    return np.asarray([int(e) for e in edges], dtype=np.uint64)


@jit
def _popcount(x):
    c = 0
    while x:
        x &= x - np.uint64(1)
        c += 1
    return c


# ---------------------------------------------------------------------------
# pairwise tests and counting


@jit
def _all_intersect_nb(edges):
    m = edges.shape[0]
    for i in range(m):
        a = edges[i]
        for j in range(i + 1, m):
            if (a & edges[j]) == np.uint64(0):
                return False
    return True


def _all_intersect_np(edges):
    m = edges.shape[0]
    step = 512
    for lo in range(0, m, step):
        block = edges[lo:lo + step]
        if np.any((block[:, None] & edges[None, :]) == 0):
            return False
    return True


def all_intersect(edges: np.ndarray) -> bool:
    if edges.shape[0] < 2:
        return True
    if NUMBA_ENABLED:
        return bool(_all_intersect_nb(edges))
    return bool(_all_intersect_np(edges))


@jit
def _count_avoiding_nb(edges, subsets):
    out = np.zeros(subsets.shape[0], dtype=np.int64)
    for i in range(subsets.shape[0]):
        s = subsets[i]
        c = 0
        for j in range(edges.shape[0]):
            if (edges[j] & s) == np.uint64(0):
                c += 1
        out[i] = c
    return out


def _count_avoiding_np(edges, subsets):
    out = np.empty(subsets.shape[0], dtype=np.int64)
    step = max(1, (1 << 20) // max(1, edges.shape[0]))
    for lo in range(0, subsets.shape[0], step):
        blk = subsets[lo:lo + step]
        out[lo:lo + step] = ((blk[:, None] & edges[None, :]) == 0).sum(axis=1)
    return out


def count_avoiding(edges: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    """For each mask in ``subsets``, the number of edges disjoint from it."""
    if subsets.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if NUMBA_ENABLED:
        return _count_avoiding_nb(edges, subsets)
    return _count_avoiding_np(edges, subsets)


@jit
def _min_count_avoiding_nb(edges, subsets):
    best = edges.shape[0] + 1
    arg = -1
    for i in range(subsets.shape[0]):
        s = subsets[i]
        c = 0
        for j in range(edges.shape[0]):
            if (edges[j] & s) == np.uint64(0):
                c += 1
                if c >= best:
                    break
        if c < best:
            best = c
            arg = i
            if best == 0:
                break
    return best, arg


def min_count_avoiding(edges: np.ndarray, subsets: np.ndarray) -> tuple[int, int]:
    """Minimum over ``subsets`` of the avoiding count, with the first argmin."""
    if NUMBA_ENABLED:
        b, a = _min_count_avoiding_nb(edges, subsets)
        return int(b), int(a)
    counts = _count_avoiding_np(edges, subsets)
    a = int(np.argmin(counts))
    return int(counts[a]), a


@jit
def _ksubsets_nb(n, k, count):
    out = np.empty(count, dtype=np.uint64)
    if k == 0:
        out[0] = np.uint64(0)
        return out
    x = (np.uint64(1) << np.uint64(k)) - np.uint64(1)
    for i in range(count):
        out[i] = x
        if i + 1 == count:
            break
        c = x & (~x + np.uint64(1))
        r = x + c
        x = (((r ^ x) >> np.uint64(2)) // c) | r
    return out


def ksubsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) as masks, in increasing order."""
    from math import comb

    if k < 0 or k > n:
        return np.zeros(0, dtype=np.uint64)
    if n > 63:
        raise ValueError("k-subset enumeration is limited to n <= 63")
    count = comb(n, k)
    if NUMBA_ENABLED:
        return _ksubsets_nb(n, k, count)
    return _ksubsets_nb.py_func(n, k, count)


# ---------------------------------------------------------------------------
# saturation


@jit
def _greedy_saturate_nb(universe, edges):
    m = edges.shape[0]
    fam = np.empty(m + universe.shape[0], dtype=np.uint64)
    fam[:m] = edges
    size = m
    for i in range(universe.shape[0]):
        c = universe[i]
        ok = True
        for j in range(size):
            f = fam[j]
            if f == c or (f & c) == np.uint64(0):
                ok = False
                break
        if ok:
            fam[size] = c
            size += 1
    return fam[:size]


def greedy_saturate(universe: np.ndarray, edges: np.ndarray) -> np.ndarray:
    if NUMBA_ENABLED:
        return _greedy_saturate_nb(universe, edges)
    return _greedy_saturate_nb.py_func(universe, edges)


@jit
def _first_addable_nb(universe, edges):
    for i in range(universe.shape[0]):
        c = universe[i]
        ok = True
        for j in range(edges.shape[0]):
            f = edges[j]
            if f == c or (f & c) == np.uint64(0):
                ok = False
                break
        if ok:
            return i
    return -1


def first_addable(universe: np.ndarray, edges: np.ndarray) -> int:
    """Index of the first universe mask not in ``edges`` that meets every edge."""
    if NUMBA_ENABLED:
        return int(_first_addable_nb(universe, edges))
    step = 4096
    for lo in range(0, universe.shape[0], step):
        blk = universe[lo:lo + step]
        meets = ~np.any((blk[:, None] & edges[None, :]) == 0, axis=1)
        fresh = ~np.isin(blk, edges)
        hit = np.flatnonzero(meets & fresh)
        if hit.size:
            return lo + int(hit[0])
    return -1


# ---------------------------------------------------------------------------
# covering and matching numbers


@jit
def _min_transversal_nb(edges, cap):
    """Exact minimum transversal by branch and bound.

    Branches on the lowest-index uncovered edge, vertices ascending; vertices
    tried in earlier sibling branches are forbidden in later ones.  ``cap``
    is an exclusive upper bound on the sizes worth reporting (use a large
    value for an exact answer).
    """
    m = edges.shape[0]
    if m == 0:
        return 0, np.uint64(0)
    # greedy cover as the initial incumbent
    g = np.uint64(0)
    for i in range(m):
        if (edges[i] & g) == np.uint64(0):
            e = edges[i]
            g |= e & (~e + np.uint64(1))
    best = _popcount(g)
    best_mask = g
    if cap < best:
        best = cap
        best_mask = np.uint64(0)
    depth_max = m + 2
    chosen = np.zeros(depth_max, dtype=np.uint64)
    forb = np.zeros(depth_max, dtype=np.uint64)
    rem = np.zeros(depth_max, dtype=np.uint64)
    br = np.zeros(depth_max, dtype=np.uint64)
    lvl = 0
    chosen[0] = np.uint64(0)
    forb[0] = np.uint64(0)
    rem[0] = np.uint64(0)
    setup = True
    while lvl >= 0:
        if setup:
            setup = False
            ch = chosen[lvl]
            fb = forb[lvl]
            first = -1
            dead = False
            for i in range(m):
                if (edges[i] & ch) == np.uint64(0):
                    if (edges[i] & ~fb) == np.uint64(0):
                        dead = True
                        break
                    if first < 0:
                        first = i
            if dead:
                rem[lvl] = np.uint64(0)
            elif first < 0:
                if lvl < best:
                    best = lvl
                    best_mask = ch
                rem[lvl] = np.uint64(0)
            else:
                # greedy packing of uncovered edges gives a lower bound
                used = np.uint64(0)
                lb = 0
                for i in range(m):
                    e = edges[i] & ~fb
                    if (edges[i] & ch) == np.uint64(0) and (e & used) == np.uint64(0):
                        used |= e
                        lb += 1
                if lvl + lb >= best:
                    rem[lvl] = np.uint64(0)
                else:
                    rem[lvl] = edges[first] & ~fb
                    br[lvl] = rem[lvl]
        if rem[lvl] == np.uint64(0):
            lvl -= 1
            continue
        r = rem[lvl]
        bit = r & (~r + np.uint64(1))
        rem[lvl] = r ^ bit
        chosen[lvl + 1] = chosen[lvl] | bit
        # earlier siblings' vertices are excluded from this branch
        forb[lvl + 1] = forb[lvl] | (br[lvl] & ~r)
        lvl += 1
        setup = True
    return best, best_mask


def min_transversal(edges: np.ndarray, cap: int = 1 << 30) -> tuple[int, int]:
    if NUMBA_ENABLED:
        b, mask = _min_transversal_nb(edges, cap)
    else:
        b, mask = _min_transversal_nb.py_func(edges, cap)
    return int(b), int(mask)


@jit
def _max_matching_nb(edges):
    m = edges.shape[0]
    if m == 0:
        return 0
    best = 1
    used = np.zeros(m + 1, dtype=np.uint64)
    nxt = np.zeros(m + 1, dtype=np.int64)
    lvl = 0
    while lvl >= 0:
        i = nxt[lvl]
        u = used[lvl]
        while i < m and (edges[i] & u) != np.uint64(0):
            i += 1
        if i >= m or lvl + (m - i) <= best:
            lvl -= 1
            continue
        nxt[lvl] = i + 1
        used[lvl + 1] = u | edges[i]
        nxt[lvl + 1] = i + 1
        lvl += 1
        if lvl > best:
            best = lvl
    return best


def max_matching(edges: np.ndarray) -> int:
    if NUMBA_ENABLED:
        return int(_max_matching_nb(edges))
    return int(_max_matching_nb.py_func(edges))


# ---------------------------------------------------------------------------
# lexicographically minimal relabeling


@jit
def _lexmin_nb(masks, s, test_only):
    """Minimal sorted edge list over all relabelings of ``range(s)``.

    Labels are handed out 0, 1, 2, ...; once labels 0..j are placed, every edge
    inside them is final and all remaining edges have larger masks, so the
    placed block can be compared with the incumbent immediately.

    With ``test_only`` the input order is the incumbent and the search stops
    as soon as a strictly smaller list appears.  Returns
    ``(best, perm, aut, canonical)``; ``perm[j]`` is the input vertex given
    label j and ``aut`` counts relabelings that reach the minimum.
    """
    m = masks.shape[0]
    need = np.zeros(m, dtype=np.int64)
    deg = np.zeros(s + 1, dtype=np.int64)
    for e in range(m):
        x = masks[e]
        c = 0
        v = 0
        while x:
            if x & np.uint64(1):
                deg[v] += 1
                c += 1
            x >>= np.uint64(1)
            v += 1
        need[e] = c
    ptr = np.zeros(s + 1, dtype=np.int64)
    for v in range(s):
        ptr[v + 1] = ptr[v] + deg[v]
    idx = np.zeros(ptr[s], dtype=np.int64)
    fill = ptr[:s].copy()
    for e in range(m):
        x = masks[e]
        v = 0
        while x:
            if x & np.uint64(1):
                idx[fill[v]] = e
                fill[v] += 1
            x >>= np.uint64(1)
            v += 1

    cnt = np.zeros(m, dtype=np.int64)
    nm = np.zeros(m, dtype=np.uint64)
    cur = np.zeros(m, dtype=np.uint64)
    lvl_len = np.zeros(s + 1, dtype=np.int64)
    status = np.zeros(s + 1, dtype=np.int64)
    label = -np.ones(s, dtype=np.int64)
    perm = np.zeros(s, dtype=np.int64)
    nextv = np.zeros(s + 1, dtype=np.int64)

    best = np.zeros(m, dtype=np.uint64)
    best_len = np.zeros(s + 1, dtype=np.int64)
    best_perm = np.arange(s)
    have_best = False
    aut = 0

    if test_only:
        have_best = True
        for e in range(m):
            best[e] = masks[e]
        # best_len[j]: edges whose labels all lie below j
        for j in range(s + 1):
            lim = (np.uint64(1) << np.uint64(j)) if j < 64 else np.uint64(0)
            c = 0
            for e in range(m):
                if j >= 64 or masks[e] < lim:
                    c += 1
            best_len[j] = c

    curlen = 0
    lvl = 0
    nextv[0] = 0
    while lvl >= 0:
        if lvl == s:
            st = status[s]
            if (not have_best) or st < 0:
                if test_only:
                    return best, best_perm, aut, False
                for e in range(m):
                    best[e] = cur[e]
                for j in range(s + 1):
                    best_len[j] = lvl_len[j]
                for j in range(s):
                    best_perm[j] = perm[j]
                have_best = True
                aut = 1
                for j in range(s + 1):
                    status[j] = 0
            else:
                aut += 1
            lvl -= 1
            # undo the vertex placed at this level
            v = perm[lvl]
            bit = np.uint64(1) << np.uint64(lvl)
            for p in range(ptr[v], ptr[v + 1]):
                e = idx[p]
                cnt[e] -= 1
                nm[e] &= ~bit
            label[v] = -1
            curlen = lvl_len[lvl]
            continue

        v = nextv[lvl]
        while v < s and label[v] != -1:
            v += 1
        if v >= s:
            lvl -= 1
            if lvl >= 0:
                u = perm[lvl]
                bit = np.uint64(1) << np.uint64(lvl)
                for p in range(ptr[u], ptr[u + 1]):
                    e = idx[p]
                    cnt[e] -= 1
                    nm[e] &= ~bit
                label[u] = -1
                curlen = lvl_len[lvl]
            continue
        nextv[lvl] = v + 1

        bit = np.uint64(1) << np.uint64(lvl)
        start = curlen
        for p in range(ptr[v], ptr[v + 1]):
            e = idx[p]
            cnt[e] += 1
            nm[e] |= bit
            if cnt[e] == need[e]:
                # insertion into the sorted block
                x = nm[e]
                q = curlen
                while q > start and cur[q - 1] > x:
                    cur[q] = cur[q - 1]
                    q -= 1
                cur[q] = x
                curlen += 1
        lvl_len[lvl + 1] = curlen

        st = status[lvl]
        if have_best and st == 0:
            a0 = start
            a1 = curlen
            b0 = best_len[lvl]
            b1 = best_len[lvl + 1]
            la = a1 - a0
            lb = b1 - b0
            c = 0
            q = 0
            while q < la and q < lb:
                if cur[a0 + q] < best[b0 + q]:
                    c = -1
                    break
                if cur[a0 + q] > best[b0 + q]:
                    c = 1
                    break
                q += 1
            if c == 0:
                if la < lb:
                    c = 1
                elif la > lb:
                    c = -1
            if c > 0:
                for p in range(ptr[v], ptr[v + 1]):
                    e = idx[p]
                    cnt[e] -= 1
                    nm[e] &= ~bit
                curlen = start
                continue
            if c < 0 and test_only:
                return best, best_perm, aut, False
            status[lvl + 1] = c
        else:
            status[lvl + 1] = -1 if (have_best and st < 0) or not have_best else 0
        label[v] = lvl
        perm[lvl] = v
        lvl += 1
        nextv[lvl] = 0
    return best, best_perm, aut, True


def lexmin(masks: np.ndarray, s: int, test_only: bool = False):
    if NUMBA_ENABLED:
        return _lexmin_nb(masks, s, test_only)
    return _lexmin_nb.py_func(masks, s, test_only)


# ---------------------------------------------------------------------------
# orderly search: one pass over the candidate children of a node


@jit
def _min_avoid_nb(fam, size, owners, n_owners, subsets, inside_only, stop_below):
    """Smallest number of ``fam[:size]`` edges avoiding a subset.

    With ``inside_only`` a subset counts only if it lies inside one of
    ``owners[:n_owners]``.  Scanning stops once the value drops below
    ``stop_below``.  Returns a huge value when no subset qualifies.
    """
    best = 1 << 40
    for t in range(subsets.shape[0]):
        S = subsets[t]
        if inside_only:
            inside = False
            for e in range(n_owners):
                if (owners[e] & S) == S:
                    inside = True
                    break
            if not inside:
                continue
        cnt = 0
        for e in range(size):
            if (fam[e] & S) == np.uint64(0):
                cnt += 1
        if cnt < best:
            best = cnt
            if best < stop_below:
                return best
    return best


def min_avoid(fam: np.ndarray, owners: np.ndarray, subsets: np.ndarray, inside_only: bool) -> int:
    f = _min_avoid_nb if NUMBA_ENABLED else _min_avoid_nb.py_func
    return int(f(fam, fam.shape[0], owners, owners.shape[0], subsets, inside_only, -1))


@jit
def _child_filter_nb(parent, cands, subsets, need, tau_min, inside_only):
    """Flags for candidates whose child survives every cut and is canonical.

    The descendants of ``parent + [c]`` only add candidates after ``c`` that
    meet ``c``, so the objective bound and the covering bound are evaluated on
    that superset.  The canonical test runs last, on survivors only.
    """
    m = parent.shape[0]
    nc = cands.shape[0]
    out = np.zeros(nc, dtype=np.bool_)
    buf = np.empty(m + nc, dtype=np.uint64)
    child = np.empty(m + 1, dtype=np.uint64)
    base = np.uint64(0)
    for i in range(m):
        buf[i] = parent[i]
        child[i] = parent[i]
        base |= parent[i]
    for i in range(nc):
        c = cands[i]
        sup = base | c
        s = _popcount(sup)
        full = (np.uint64(1) << np.uint64(s)) - np.uint64(1) if s < 64 else ~np.uint64(0)
        if sup != full:
            continue
        size = m
        buf[size] = c
        size += 1
        for j in range(i + 1, nc):
            d = cands[j]
            if (d & c) != np.uint64(0):
                buf[size] = d
                size += 1
        if need > 0:
            if _min_avoid_nb(buf, size, buf, m + 1, subsets, inside_only, need) < need:
                continue
        if tau_min > 1:
            t, _ = _min_transversal_nb(buf[:size], tau_min)
            if t < tau_min:
                continue
        child[m] = c
        if not _lexmin_nb(child, s, True)[3]:
            continue
        out[i] = True
    return out


def child_filter(parent: np.ndarray, cands: np.ndarray, subsets: np.ndarray, need: int,
                 tau_min: int, inside_only: bool) -> np.ndarray:
    f = _child_filter_nb if NUMBA_ENABLED else _child_filter_nb.py_func
    return f(parent, cands, subsets, need, tau_min, inside_only)
