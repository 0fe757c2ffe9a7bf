"""Table of (2 pi / N) log K_N for one fixture, principal log.

Closed fixtures carry abelian holonomy and give K_N = 1, so the table is
flat at 0 up to rounding; it exercises the pipeline, not the limit.
"""
from __future__ import annotations

import argparse

from qhi.cyclotomic import RootContext, RootDetermination
from qhi.fixtures import get_fixture
from qhi.statesum import asymptotic_ratio


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default="s14_23")
    ap.add_argument("--N", type=int, nargs="+", default=[3, 5, 7, 9, 11])
    args = ap.parse_args()
    doc = get_fixture(args.fixture)
    build = lambda N: (RootContext(N), RootDetermination(N), doc.tri, doc.H, doc.branching,
                       doc.cocycle, doc.charge)
    print(f"{'N':>3}{'Re':>24}{'Im':>24}")
    for N, v in asymptotic_ratio(args.N, build):
        print(f"{N:>3}{v.real:>24.15g}{v.imag:>24.15g}")


if __name__ == "__main__":
    main()
