"""Residual summary of every algebraic identity at N = 3, 5, 7."""
from __future__ import annotations

import argparse
from collections import defaultdict

from qhi.checks import five_term_checks, identity_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = defaultdict(list)
    for N in args.N:
        for c in identity_suite(N, args.draws, args.seed + N):
            rows[(c.name.split("[")[0], N)].append(c)
    for c in five_term_checks():
        rows[("five_term", "-")].append(c)
    print(f"{'identity':<24}{'N':>3}{'draws':>7}{'max residual':>15}  status")
    for (name, N), cs in rows.items():
        worst = max(c.residual for c in cs)
        ok = all(c.passed for c in cs)
        print(f"{name:<24}{N!s:>3}{len(cs):>7}{worst:>15.3e}  {'PASS' if ok else 'FAIL'}")


if __name__ == "__main__":
    main()
