"""Compare the numba kernels with the fallback path.

Each backend runs in its own interpreter because the backend is fixed at
import time by ``DIVLAB_DISABLE_NUMBA``.  Times are the best of ``--repeat``
runs after one warm-up call (which also absorbs JIT compilation).

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --repeat 5 --json out.json
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _cases():
    from divlab import _kernels as K
    from divlab import constructions as C
    from divlab.search import SearchTask, enumerate_classes, run_search

    l3 = C.l3().masks
    c73 = C.complete(7, 3).masks
    tt = C.t0_triangle()
    pc = C.pentagon_cycle()
    sub18 = K.ksubsets(18, 5)
    sub15 = K.ksubsets(15, 4)
    u10 = K.ksubsets(10, 5)
    seed = C.fano().with_n(10).masks
    return {
        "lexmin L3 (13 pts, |Aut|=5616)": lambda: K.lexmin(l3, 13, False),
        "lexmin C(7,3) (|Aut|=5040)": lambda: K.lexmin(c73, 7, False),
        "min_transversal t0-triangle": lambda: K.min_transversal(tt.masks),
        "max_matching pentagon-cycle": lambda: K.max_matching(pc.masks),
        "gamma_5 t0-triangle (8568 sets)": lambda: K.min_count_avoiding(tt.masks, sub18),
        "gamma_4 pentagon-cycle (1365 sets)": lambda: K.min_count_avoiding(pc.masks, sub15),
        "greedy_saturate fano in C(10,5)": lambda: K.greedy_saturate(u10, seed),
        "all_intersect t0-triangle": lambda: K.all_intersect(tt.masks),
        "enumerate classes k=3 n<=7": lambda: enumerate_classes(3, 7),
        "search k=3 ell=2 n_max=7": lambda: run_search(SearchTask(k=3, ell=2, n_max=7, tau_min=3)),
    }


def worker(repeat: int) -> dict:
    from divlab import NUMBA_ENABLED

    out = {"numba": NUMBA_ENABLED, "times": {}}
    for name, fn in _cases().items():
        fn()
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t)
        out["times"][name] = best
    return out


def run_backend(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env["DIVLAB_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    ap.add_argument("--json", default=None, help="also write raw timings here")
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return 0
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if not fast["numba"]:
        print("numba is not importable; both columns use the fallback", file=sys.stderr)
    width = max(len(n) for n in fast["times"])
    print(f"{'kernel':<{width}}  {'numba':>10}  {'fallback':>10}  {'speedup':>8}")
    for name, tf in fast["times"].items():
        ts = slow["times"][name]
        print(f"{name:<{width}}  {tf * 1e3:>8.2f}ms  {ts * 1e3:>8.2f}ms  {ts / tf:>7.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"numba": fast, "fallback": slow}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
