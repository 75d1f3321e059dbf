"""Command line entry point: ``divlab <subcommand>``.

Reports go to stdout as JSON, diagnostics to stderr.  Exit codes: 0 success
or certified, 1 usage/input error, 2 counterexample, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import branching, claims, constructions, counting
from .canon import canonize
from .family import FamilyFormatError, family_from_json, family_stats, family_to_json
from .search import MODES, SearchTask, run_search

log = logging.getLogger("divlab")

EXIT_OK, EXIT_ERROR, EXIT_COUNTEREXAMPLE, EXIT_BUDGET = 0, 1, 2, 3


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _bigints(obj):
    """Integers beyond 2^53 become decimal strings so JSON consumers keep them exact."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) >= 2**53 else obj
    if isinstance(obj, dict):
        return {k: _bigints(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_bigints(v) for v in obj]
    return obj


def emit(obj) -> None:
    sys.stdout.write(json.dumps(_bigints(obj), indent=2, sort_keys=True, default=_default))
    sys.stdout.write("\n")


def _read_family(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return family_from_json(text)


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("DIVLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer DIVLAB_JOBS=%r", env)
    return 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> int:
    fam = _read_family(args.path)
    stats = family_stats(fam, with_basis=not args.no_basis)
    out = {"n": fam.n, "k": fam.k, **stats.to_json()}
    if args.canonical and fam.edges:
        c = canonize(fam)
        out["canonical_form"] = c.form.hex()
        out["automorphisms"] = c.automorphisms
    emit(out)
    return EXIT_OK


def cmd_construct(args) -> int:
    obj = constructions.build(args.name, n=args.n, k=args.k)
    if isinstance(obj, constructions.GeneratedFamily):
        out = obj.to_json()
        out["size"] = str(obj.size())
        if args.enumerate:
            out["edges"] = family_to_json(obj.enumerate())["edges"]
        emit(out)
    else:
        emit(family_to_json(obj))
    return EXIT_OK


def cmd_search(args) -> int:
    if args.n_max > 8:
        log.warning("n_max=%d exceeds the default scope of 8; runtime may grow quickly", args.n_max)
    task = SearchTask(
        k=args.k, ell=args.ell, n_max=args.n_max, mode=args.mode, tau_min=args.tau_min,
        gamma_min=args.gamma_min, budget_nodes=args.budget_nodes, budget_seconds=args.budget_seconds,
        frontier_depth=args.frontier_depth, max_witnesses=args.max_witnesses,
    )
    rep = run_search(task, jobs=_jobs(args), timing=args.timing)
    emit(rep.to_json(timing=args.timing))
    if not rep.validated:
        log.error("witness re-validation failed: %s", rep.validation_errors)
        return EXIT_ERROR
    if not rep.exhausted:
        return EXIT_BUDGET
    if task.mode != "max_gamma" and rep.witnesses:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.claim not in claims.CLAIMS:
        log.error("unknown claim %r; known: %s", args.claim, ", ".join(claims.CLAIMS))
        return EXIT_ERROR
    opts = claims.Options(
        n_max=args.n_max, budget_nodes=args.budget_nodes, budget_seconds=args.budget_seconds,
        jobs=_jobs(args), seed=args.seed, timing=args.timing,
    )
    out = claims.certify(args.claim, opts)
    emit(out)
    log.info("%s: %s", args.claim, out["outcome"])
    return claims.EXIT_CODES[out["outcome"]]


BOUND_NAMES = ("main", "reduced", "case1", "triple_level", "triple_level_generic", "pair_level_exact", "degree_constant")


def cmd_bound(args) -> int:
    spec = counting.BoundSpec(ell=args.ell, k=args.k, n=args.n, m_value=args.m, m_source=args.m_source)
    vals = counting.theorem_bounds(spec)
    params = {"ell": args.ell, "k": args.k, "n": args.n, "m_value": args.m, "m_source": args.m_source,
              "threshold_factor": str(vals["threshold_factor"]), "hypothesis_holds": vals["hypothesis_holds"]}
    names = [args.name] if args.name else list(BOUND_NAMES)
    recs = [
        {"bound_name": nm, "parameters": params, "value": None if vals[nm] is None else str(vals[nm])}
        for nm in names
    ]
    emit(recs[0] if args.name else recs)
    if not vals["hypothesis_holds"]:
        log.warning("n is below the size threshold the bounds assume")
    return EXIT_OK


def cmd_branching(args) -> int:
    fam = _read_family(args.path)
    try:
        if args.lemma == "3.3":
            cert = branching.verify_pair_branching(fam)
            emit(cert.to_json())
            if not cert.applicable:
                log.warning("not applicable: %s", cert.reason)
                return EXIT_OK
            return EXIT_OK if cert.holds else EXIT_COUNTEREXAMPLE
        branching.prepare(fam)
        ells = [args.ell] if args.ell is not None else branching.admissible_ells(fam)
        certs = [branching.verify_branching(fam, ell, trace=args.debug_trace) for ell in ells]
    except branching.NotApplicable as exc:
        emit({"applicable": False, "reason": str(exc)})
        return EXIT_OK
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    emit([c.to_json() for c in certs] if args.ell is None else certs[0].to_json())
    bad = [c for c in certs if not (c.holds and c.sums_agree)]
    if bad:
        log.error("inequality violated for ell=%s: implementation bug", [c.ell for c in bad])
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget-nodes", type=int, default=None, help="node budget (split evenly over subtree jobs)")
    p.add_argument("--budget-seconds", type=float, default=None, help="wall-clock budget")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $DIVLAB_JOBS or 1)")
    p.add_argument("--timing", action="store_true", help="include elapsed time (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="divlab", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="statistics of a family given as JSON")
    p.add_argument("path", nargs="?", default="-", help="family JSON file, or - for stdin")
    p.add_argument("--no-basis", action="store_true", help="skip the basis computation")
    p.add_argument("--canonical", action="store_true", help="add canonical form and automorphism count")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", help="emit a named family as JSON")
    p.add_argument("name", help="fano, t0, l3, parity-blocks, triangle-pairs, pentagon-bridge, pentagon-cycle, "
                   "t0-triangle, triangle, ekr-triangle, complete, generated-{fano,t0,l3}")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--enumerate", action="store_true", help="list edges of a generated family")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("search", help="orderly search over intersecting k-graphs")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--mode", choices=MODES, default="max_gamma")
    p.add_argument("--tau-min", type=int, default=0)
    p.add_argument("--gamma-min", type=int, default=0)
    p.add_argument("--frontier-depth", type=int, default=3)
    p.add_argument("--max-witnesses", type=int, default=256)
    _budget_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("certify", help="check one of the built-in claims")
    p.add_argument("claim", help=", ".join(claims.CLAIMS))
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")
    _budget_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bound", help="evaluate the diversity upper bounds exactly")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True, help="value of m_ell(ell+1) to plug in")
    p.add_argument("--m-source", default="caller-supplied", help="provenance of --m")
    p.add_argument("--name", choices=BOUND_NAMES, default=None)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("branching", help="weighted branching certificate for a saturated family")
    p.add_argument("path", nargs="?", default="-")
    p.add_argument("--ell", type=int, default=None, help="default: every admissible ell")
    p.add_argument("--lemma", choices=("2.2", "3.3"), default="2.2",
                   help="2.2: weighted sum over U; 3.3: pair sums bounded by 24 when tau=4")
    p.add_argument("--debug-trace", action="store_true", help="simulate the sequence process")
    p.set_defaults(func=cmd_branching)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except FamilyFormatError as exc:
        log.error("bad family input: %s", exc)
        return EXIT_ERROR
    except (KeyError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
