"""Isomorph-free exhaustive search over intersecting k-graphs on at most n_max vertices.

Families are generated in orderly fashion: a node is a canonical family (its
sorted mask list is the smallest over all relabelings of its support), and it
is extended only by edges larger than its last edge.  A child is kept iff it
is canonical again, which visits every isomorphism class exactly once.

Cuts use monotonicity.  Every descendant of a child lies inside the child plus
the later candidates that meet all of its edges, so the objective bound and
the covering number are evaluated on that superset.

The tree is split at a fixed frontier depth into independent subtree tasks.
Each task starts from the incumbent reached by the serial frontier phase and
shares nothing with the others, so reports do not depend on the worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context

import numpy as np

from . import _kernels as K
from .canon import canonical_form, encode
from .family import Family, bits, covering_number, diversity, is_intersecting, popcount

log = logging.getLogger(__name__)

MODES = ("max_gamma", "classify", "counterexample")
MAX_SEARCH_N = 33


@dataclass(frozen=True)
class SearchTask:
    """Search constraints.

    ``max_gamma`` maximises gamma_ell subject to tau >= tau_min and reports all
    optimal classes.  ``counterexample`` lists classes with tau >= tau_min and
    gamma_ell >= gamma_min.  ``classify`` uses the objective "fewest edges
    avoiding an ell-set that lies inside some edge" and lists classes reaching
    gamma_min whose canonical form is not in ``exclude``.
    """

    k: int
    ell: int
    n_max: int
    mode: str = "max_gamma"
    tau_min: int = 0
    gamma_min: int = 0
    exclude: tuple[str, ...] = ()
    budget_nodes: int | None = None
    budget_seconds: float | None = None
    frontier_depth: int = 3
    max_witnesses: int = 256
    prune: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 2 <= self.k <= 6:
            raise ValueError("k must lie in 2..6")
        if not 0 <= self.ell < self.k:
            raise ValueError("need 0 <= ell < k")
        if not self.k <= self.n_max <= MAX_SEARCH_N:
            raise ValueError(f"need k <= n_max <= {MAX_SEARCH_N}")
        if self.frontier_depth < 1:
            raise ValueError("frontier_depth must be at least 1")

    @property
    def inside_only(self) -> bool:
        return self.mode == "classify"


@dataclass
class SearchReport:
    task: dict
    optimum: int | None
    witnesses: list[str]
    witness_count: int
    nodes_explored: int
    scope: int
    exhausted: bool
    tasks: int = 0
    excluded_hits: list[str] = field(default_factory=list)
    validated: bool = True
    validation_errors: list[str] = field(default_factory=list)
    elapsed_seconds: float | None = None

    @property
    def found(self) -> bool:
        return bool(self.witnesses)

    def to_json(self, timing: bool = False) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("elapsed_seconds")
        out["scope_statement"] = f"verified for support <= {self.scope} vertices" if self.exhausted else (
            f"partial: budget exhausted before covering support <= {self.scope}"
        )
        return out


# ---------------------------------------------------------------------------
# node evaluation


class _Walker:
    """Depth-first expansion of one subtree with a private incumbent."""

    def __init__(self, task: SearchTask, incumbent: int | None, node_budget: int | None, deadline: float | None):
        self.t = task
        self.subsets = K.ksubsets(task.n_max, task.ell)
        self.universe = K.ksubsets(task.n_max, task.k)
        self.incumbent = incumbent
        self.best: list[str] = []
        self.best_count = 0
        self.excluded_hits: set[str] = set()
        self.nodes = 0
        self.node_budget = node_budget
        self.deadline = deadline
        self.stopped = False
        self.exclude = set(task.exclude)

    def need(self) -> int:
        if not self.t.prune:
            return 0
        if self.t.mode == "max_gamma" and self.incumbent is not None:
            return max(self.incumbent, self.t.gamma_min)
        return self.t.gamma_min

    def tau_need(self) -> int:
        return self.t.tau_min if self.t.prune else 0

    def _tick(self) -> bool:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            self.stopped = True
        elif self.deadline is not None and (self.nodes & 255) == 0 and time.time() > self.deadline:
            self.stopped = True
        return not self.stopped

    def value(self, fam: np.ndarray) -> int | None:
        """Objective of a family, or None when it violates the covering constraint."""
        if self.t.tau_min > 1:
            size, _ = K.min_transversal(fam, self.t.tau_min)
            if size < self.t.tau_min:
                return None
        return K.min_avoid(fam, fam, self.subsets, self.t.inside_only)

    def record(self, fam: np.ndarray) -> None:
        v = self.value(fam)
        if v is None:
            return
        s = popcount(int(np.bitwise_or.reduce(fam)))
        mode = self.t.mode
        if mode == "max_gamma":
            if v < self.t.gamma_min:
                return
            if self.incumbent is None or v > self.incumbent:
                self.incumbent = v
                self.best = []
                self.best_count = 0
            if v == self.incumbent:
                self._keep(encode(s, self.t.k, fam).hex())
        else:
            if v < self.t.gamma_min:
                return
            h = encode(s, self.t.k, fam).hex()
            if h in self.exclude:
                self.excluded_hits.add(h)
            else:
                self._keep(h)

    def _keep(self, h: str) -> None:
        self.best_count += 1
        if len(self.best) < self.t.max_witnesses:
            self.best.append(h)

    def children(self, fam: np.ndarray, cands: np.ndarray):
        """Surviving children as ``(child, child_candidates)`` pairs."""
        if cands.shape[0] == 0:
            return
        flags = K.child_filter(fam, cands, self.subsets, self.need(), self.tau_need(), self.t.inside_only)
        for i in np.flatnonzero(flags):
            c = cands[i]
            later = cands[i + 1 :]
            yield np.append(fam, c), later[(later & c) != 0]

    def walk(self, fam: np.ndarray, cands: np.ndarray) -> None:
        """Expand the children of an already-recorded node."""
        stack = [self.children(fam, cands)]
        while stack and not self.stopped:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                continue
            child, ccands = nxt
            if not self._tick():
                break
            self.record(child)
            stack.append(self.children(child, ccands))


def _root(task: SearchTask) -> tuple[np.ndarray, np.ndarray]:
    universe = K.ksubsets(task.n_max, task.k)
    e0 = np.uint64((1 << task.k) - 1)
    cands = universe[(universe > e0) & ((universe & e0) != 0)]
    return np.array([e0], dtype=np.uint64), cands


def _subtree_job(args):
    task, fam, cands, incumbent, budget, deadline = args
    w = _Walker(task, incumbent, budget, deadline)
    w.walk(fam, cands)
    return {
        "incumbent": w.incumbent,
        "best": w.best,
        "best_count": w.best_count,
        "excluded": sorted(w.excluded_hits),
        "nodes": w.nodes,
        "stopped": w.stopped,
    }


def _frontier(task: SearchTask, deadline: float | None):
    """Serial expansion down to the frontier; returns the walker and the subtree jobs."""
    w = _Walker(task, None, task.budget_nodes, deadline)
    fam, cands = _root(task)
    w._tick()
    w.record(fam)
    jobs: list[tuple[np.ndarray, np.ndarray]] = []
    stack = [(fam, cands)]
    while stack and not w.stopped:
        f, c = stack.pop()
        if f.shape[0] >= task.frontier_depth:
            jobs.append((f, c))
            continue
        kids = list(w.children(f, c))
        for child, ccands in kids:
            if not w._tick():
                break
            w.record(child)
        # reversed so the stack pops children in increasing order
        stack.extend(reversed(kids))
    jobs.sort(key=lambda fc: tuple(int(x) for x in fc[0]))
    return w, jobs


def run_search(task: SearchTask, jobs: int = 1, timing: bool = False) -> SearchReport:
    start = time.time()
    deadline = start + task.budget_seconds if task.budget_seconds is not None else None
    front, subtrees = _frontier(task, deadline)
    incumbent = front.incumbent
    nodes = front.nodes
    stopped = front.stopped
    results = []
    if subtrees and not stopped:
        per = None
        if task.budget_nodes is not None:
            per = max(1, (task.budget_nodes - nodes) // len(subtrees))
        args = [(task, f, c, incumbent, per, deadline) for f, c in subtrees]
        if jobs > 1 and len(args) > 1:
            ctx = get_context("spawn")
            with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as ex:
                results = list(ex.map(_subtree_job, args, chunksize=max(1, len(args) // (jobs * 8))))
        else:
            results = [_subtree_job(a) for a in args]
    # merge in task order; only classes at the final optimum survive
    pool = [(front.incumbent, front.best, front.best_count)]
    pool += [(r["incumbent"], r["best"], r["best_count"]) for r in results]
    excluded = set(front.excluded_hits)
    for r in results:
        nodes += r["nodes"]
        stopped = stopped or r["stopped"]
        excluded.update(r["excluded"])
    if task.mode == "max_gamma":
        vals = [p[0] for p in pool if p[0] is not None]
        optimum = max(vals) if vals else None
        chosen = [p for p in pool if p[0] is not None and p[0] == optimum]
    else:
        optimum = None
        chosen = pool
    found = sorted({h for p in chosen for h in p[1]})
    count = sum(p[2] for p in chosen)
    report = SearchReport(
        task=asdict(task),
        optimum=optimum,
        witnesses=found[: task.max_witnesses],
        witness_count=count,
        nodes_explored=nodes,
        scope=task.n_max,
        exhausted=not stopped,
        tasks=len(subtrees),
        excluded_hits=sorted(excluded),
    )
    errs = validate_witnesses(task, report)
    report.validated = not errs
    report.validation_errors = errs
    if timing:
        report.elapsed_seconds = round(time.time() - start, 3)
    if not errs and report.witnesses:
        log.info("%d witness class(es), %d nodes", len(report.witnesses), nodes)
    return report


# ---------------------------------------------------------------------------
# independent re-validation of witnesses


def witness_family(hex_form: str, n: int) -> Family:
    from .canon import CanonicalForm

    return CanonicalForm.from_hex(hex_form).family(n)


def inside_pair_value(fam: Family, ell: int) -> int | None:
    """Min over ell-sets S inside some edge of the number of edges avoiding S."""
    from itertools import combinations

    best = None
    seen = set()
    for e in fam.edges:
        for combo in combinations(bits(e), ell):
            S = sum(1 << v for v in combo)
            if S in seen:
                continue
            seen.add(S)
            cnt = sum(1 for f in fam.edges if not f & S)
            best = cnt if best is None else min(best, cnt)
    return best


def validate_witnesses(task: SearchTask, report: SearchReport) -> list[str]:
    errs = []
    for h in report.witnesses:
        fam = witness_family(h, task.n_max)
        if not is_intersecting(fam):
            errs.append(f"{h}: not intersecting")
        if covering_number(fam) < task.tau_min:
            errs.append(f"{h}: covering number below {task.tau_min}")
        if canonical_form(fam).hex() != h:
            errs.append(f"{h}: not in canonical form")
        if task.mode == "classify":
            v = inside_pair_value(fam, task.ell)
        else:
            v = diversity(fam, task.ell)
        if v is None or v < task.gamma_min:
            errs.append(f"{h}: objective {v} below {task.gamma_min}")
        if task.mode == "max_gamma" and v != report.optimum:
            errs.append(f"{h}: objective {v} differs from optimum {report.optimum}")
        if task.mode == "classify" and h in task.exclude:
            errs.append(f"{h}: excluded class reported")
    return errs


# ---------------------------------------------------------------------------
# enumeration helper


def enumerate_classes(k: int, n_max: int) -> list[str]:
    """Canonical forms of all nonempty intersecting k-graphs on <= n_max vertices."""
    task = SearchTask(k=k, ell=0, n_max=n_max, mode="counterexample", prune=False,
                      max_witnesses=10**9, frontier_depth=10**6)
    w = _Walker(task, None, None, None)
    fam, cands = _root(task)
    w.record(fam)
    w.walk(fam, cands)
    return sorted(w.best)
