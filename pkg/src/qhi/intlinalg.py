"""Exact integer linear algebra: column Hermite normal form and integer solving."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import Infeasible


@dataclass(frozen=True)
class HNF:
    """``A U = H`` with ``U`` unimodular and ``H`` in column echelon form.

    ``pivots[k] = (row, column k)``; columns ``rank..n-1`` of ``H`` vanish, so the
    matching columns of ``U`` span the integer kernel of ``A``.
    """

    H: tuple[tuple[int, ...], ...]
    U: tuple[tuple[int, ...], ...]
    pivots: tuple[tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel_basis(self) -> list[list[int]]:
        n = len(self.U)
        return [[self.U[i][j] for i in range(n)] for j in range(self.rank, n)]


def column_hnf(A: list[list[int]], n_cols: int | None = None) -> HNF:
    m = len(A)
    n = n_cols if n_cols is not None else (len(A[0]) if A else 0)
    H = [[int(v) for v in row] for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(dst, src, q):  # column dst -= q * column src
        if q == 0:
            return
        for M in (H, U):
            for row in M:
                row[dst] -= q * row[src]

    def swap(a, b):
        if a != b:
            for M in (H, U):
                for row in M:
                    row[a], row[b] = row[b], row[a]

    def negate(a):
        for M in (H, U):
            for row in M:
                row[a] = -row[a]

    pivots = []
    col = 0
    for r in range(m):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if H[r][j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda k: (abs(H[r][k]), k))
            swap(col, j)
            done = True
            for k in range(col + 1, n):
                if H[r][k]:
                    col_op(k, col, H[r][k] // H[r][col])
                    if H[r][k]:
                        done = False
            if done:
                break
        if all(H[r][j] == 0 for j in range(col, n)):
            continue
        if H[r][col] < 0:
            negate(col)
        for k in range(col):
            col_op(k, col, H[r][k] // H[r][col])
        pivots.append((r, col))
        col += 1
    return HNF(tuple(map(tuple, H)), tuple(map(tuple, U)), tuple(pivots))


def solve_integer(A: list[list[int]], b: list[int], n_cols: int | None = None
                  ) -> tuple[list[int], list[list[int]]]:
    """One integer solution of ``A x = b`` and an integer kernel basis.

    Deterministic: free coordinates in the HNF basis are set to 0. Raises
    ``Infeasible`` with the offending row as certificate.
    """
    n = n_cols if n_cols is not None else (len(A[0]) if A else 0)
    hnf = column_hnf(A, n)
    H = hnf.H
    y = [0] * n
    pivot_row = {r: c for r, c in hnf.pivots}
    for r in range(len(A)):
        acc = int(b[r]) - sum(H[r][j] * y[j] for j in range(min(len(hnf.pivots), n)))
        if r in pivot_row:
            c = pivot_row[r]
            # y[c] is not yet set, so acc is the residual before the pivot term
            if acc % H[r][c]:
                raise Infeasible(f"row {r}: {acc} not divisible by pivot {H[r][c]}",
                                 certificate={"row": r, "kind": "divisibility"})
            y[c] = acc // H[r][c]
        elif acc != 0:
            raise Infeasible(f"row {r} is inconsistent (residual {acc})",
                             certificate={"row": r, "kind": "inconsistent"})
    x = [sum(hnf.U[i][j] * y[j] for j in range(n)) for i in range(n)]
    return x, hnf.kernel_basis()


def matvec(A: list[list[int]], x: list[int]) -> list[int]:
    return [sum(a * v for a, v in zip(row, x)) for row in A]
