"""Command line: ``python -m qhi.cli <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 validation, 3 regularity,
4 transit failure, 5 budget. Errors print ``error[category]: message``.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import checks
from .checks import Check, Report
from .errors import QHIError, ValidationError
from .fixtures import RECIPES, check_document, fixture_catalog, get_fixture
from .qhifile import QHIDocument, parse, serialize, write

EXIT = {"validation": 2, "regularity": 3, "transit-failure": 4, "budget": 5}


def load(spec: str) -> QHIDocument:
    """A fixture name or a path to a QHI file."""
    if spec in RECIPES:
        return get_fixture(spec)
    if Path(spec).exists():
        return parse(spec)
    raise ValidationError(f"{spec!r} is neither a fixture name ({', '.join(RECIPES)}) nor a file")


def _odd(text: str) -> int:
    n = int(text)
    if n < 3 or n % 2 == 0:
        raise argparse.ArgumentTypeError(f"N must be odd and >= 3, got {n}")
    return n


def _site(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(",", " ").split())


def _emit(args, report: Report) -> int:
    if args.out == "json":
        print(report.to_json())
    else:
        for c in report.per_check:
            rule = ">" if c.above else "<"
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  residual={c.residual:.3e}  "
                  f"(needs {rule} {c.tol:g})")
        print(f"{report.command}: {'PASS' if report.passed else 'FAIL'}  "
              f"({len(report.per_check)} checks, residual_max={report.residual_max:.3e})")
    return 0 if report.passed else 1


def _pmap(fn, items, jobs: int):
    """Map in input order; ``jobs > 1`` uses worker processes."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    doc = load(args.fixture)
    diags = check_document(doc)
    per = [Check(f"{dg.kind}:{dg.location}", 1.0, 0.0, False, {"message": dg.message}) for dg in diags]
    per = per or [Check(f"valid[{doc.name}]", 0.0, 0.0, True, dict(zip(
        ("r0", "r1", "r2", "r3"), (doc.tri.r0, doc.tri.r1, doc.tri.r2, doc.tri.n_tets))))]
    code = _emit(args, Report("validate", None, (), per))
    return code and EXIT["validation"]


def cmd_evaluate(args) -> int:
    doc = load(args.fixture)
    rows = [checks.evaluate_doc(doc, N, plan=args.plan, mode=args.mode) for N in args.N]
    if args.out == "json":
        print(json.dumps({"command": "evaluate", "seed": args.seed, "N": list(args.N),
                          "results": rows}, sort_keys=True))
    else:
        for r in rows:
            K = complex(*r["K"])
            print(f"{r['name']}  N={r['N']}  mode={r['mode']}  K_N = {K.real:.15g} {K.imag:+.15g}i"
                  f"  ({r['nodes']} tetrahedra, {r['bonds']} bonds)")
    return 0


def cmd_move(args) -> int:
    doc = load(args.fixture)
    rng = np.random.default_rng(args.seed)
    if args.site is None:
        pairs = checks.move_sites(doc, args.move, rng, limit=1)
        if not pairs:
            raise ValidationError(f"no {args.move} site with a successful transit")
        site, new = pairs[0]
    else:
        site, new = args.site, checks._transited(doc, args.move, args.site, rng)
    diags = check_document(new)
    if diags:
        raise ValidationError("transited document does not validate", diags)
    if args.output:
        write(new, args.output)
        print(f"{args.move} at {list(site)}: wrote {args.output} ({new.tri.n_tets} tetrahedra)")
    else:
        sys.stdout.write(serialize(new).decode())
    return 0


def _identities(job):
    N, draws, seed, tol = job
    return checks.identity_suite(N, draws, seed + N, tol)


def cmd_verify_identities(args) -> int:
    jobs = [(N, args.draws, args.seed, args.tol) for N in args.N]
    per = [c for cs in _pmap(_identities, jobs, args.jobs) for c in cs]
    per += checks.five_term_checks()
    return _emit(args, Report("verify-identities", args.seed, tuple(args.N), per))


def cmd_invariance_test(args) -> int:
    doc = load(args.fixture)
    kinds = checks.MOVES if args.move == "all" else (args.move,)
    per = checks.move_invariance_checks(doc, kinds, args.N, args.seed, limit=args.draws,
                                        tol=args.tol, cutopen=args.mode == "cutopen",
                                        site=args.site)
    if not per:
        raise ValidationError(f"no site of {args.move} with a successful transit on {doc.name}")
    return _emit(args, Report("invariance-test", args.seed, tuple(args.N), per))


def cmd_decoration_test(args) -> int:
    doc = load(args.fixture)
    per = [c for N in args.N for c in checks.decoration_checks(doc, N, args.seed, args.tol)]
    return _emit(args, Report("decoration-test", args.seed, tuple(args.N), per))


def cmd_asymptotics(args) -> int:
    doc = load(args.fixture)
    rows = []
    for N in args.N:
        r = checks.evaluate_doc(doc, N)
        K = complex(*r["K"])
        v = 2 * np.pi / N * np.log(K) if K != 0 else complex("nan")
        rows.append({"N": N, "K": [K.real, K.imag], "ratio": [v.real, v.imag]})
    if args.out == "json":
        print(json.dumps({"command": "asymptotics", "seed": args.seed, "N": list(args.N),
                          "fixture": doc.name, "rows": rows}, sort_keys=True))
    else:
        print(f"{'N':>3}  {'Re (2pi/N) log K':>22}  {'Im (2pi/N) log K':>22}")
        for r in rows:
            print(f"{r['N']:>3}  {r['ratio'][0]:>22.15g}  {r['ratio'][1]:>22.15g}")
    return 0


def cmd_fixtures(args) -> int:
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    for doc in fixture_catalog():
        write(doc, out / f"{doc.name}.qhi")
        print(f"{doc.name}.qhi  r3={doc.tri.n_tets}  recipe={'/'.join(doc.metadata['recipe']) or '-'}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, N=(3,), tol=1e-8, fixture=True):
        if fixture:
            p.add_argument("--fixture", default="seed", help="fixture name or QHI file path")
        p.add_argument("--N", type=_odd, nargs="+", default=list(N))
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", choices=("text", "json"), default="text")
        p.add_argument("--jobs", type=int, default=1)
        return p

    p = common(sub.add_parser("validate", help="run every validator on a document"))
    p.set_defaults(func=cmd_validate)
    p = common(sub.add_parser("evaluate", help="compute K_N"))
    p.add_argument("--plan", choices=("greedy", "given"), default="greedy")
    p.add_argument("--mode", choices=("closed", "cutopen"), default="closed")
    p.set_defaults(func=cmd_evaluate)
    p = common(sub.add_parser("move", help="apply a move with decoration transit"))
    p.add_argument("--move", choices=checks.MOVES, required=True)
    p.add_argument("--site", type=_site, default=None, help="e.g. '3' or '0,0,1'")
    p.add_argument("--output", default=None, help="write the QHI file here (default stdout)")
    p.set_defaults(func=cmd_move)
    p = common(sub.add_parser("verify-identities", help="6j identities on random draws"),
               N=(3, 5, 7), tol=1e-9, fixture=False)
    p.add_argument("--draws", type=int, default=20)
    p.set_defaults(func=cmd_verify_identities)
    p = common(sub.add_parser("invariance-test", help="K_N before and after moves"), N=(3, 5))
    p.add_argument("--move", choices=checks.MOVES + ("all",), default="all")
    p.add_argument("--site", type=_site, default=None)
    p.add_argument("--draws", type=int, default=2, help="sites per move kind")
    p.add_argument("--mode", choices=("closed", "cutopen"), default="closed")
    p.set_defaults(func=cmd_invariance_test)
    p = common(sub.add_parser("decoration-test", help="K_N under decoration changes"), N=(3, 5))
    p.set_defaults(func=cmd_decoration_test)
    p = common(sub.add_parser("asymptotics", help="table of (2 pi / N) log K_N"), N=(3, 5, 7))
    p.set_defaults(func=cmd_asymptotics)
    p = sub.add_parser("fixtures", help="write the shipped catalog as QHI files")
    p.add_argument("dir")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QHIError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        for dg in getattr(exc, "diagnostics", [])[:10]:
            print(f"  {dg}", file=sys.stderr)
        return EXIT.get(exc.category, 2)


if __name__ == "__main__":
    sys.exit(main())
