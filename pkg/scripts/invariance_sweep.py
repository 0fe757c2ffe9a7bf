"""Move and decoration invariance over the whole fixture catalog."""
from __future__ import annotations

import argparse
import time

from qhi.checks import MOVES, decoration_checks, local_move_checks, move_invariance_checks
from qhi.fixtures import fixture_catalog


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sites", type=int, default=2, help="sites per move kind and fixture")
    args = ap.parse_args()
    t0 = time.perf_counter()
    print(f"{'fixture':<11}{'r3':>3}{'moves':>7}{'max |dK|/|K|':>15}{'decorations':>13}{'max rel':>11}")
    for doc in fixture_catalog():
        mv = move_invariance_checks(doc, MOVES, args.N, args.seed, limit=args.sites)
        dc = [c for N in args.N for c in decoration_checks(doc, N, args.seed)]
        print(f"{doc.name:<11}{doc.tri.n_tets:>3}{len(mv):>7}"
              f"{max(c.residual for c in mv):>15.2e}{len(dc):>13}{max(c.residual for c in dc):>11.2e}")
    loc = local_move_checks(args.N, 5, args.seed)
    print(f"local non-abelian moves: {len(loc)} checks, max {max(c.residual for c in loc):.2e}")
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
