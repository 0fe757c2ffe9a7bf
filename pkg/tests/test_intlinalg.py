from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from qhi.errors import Infeasible
from qhi.intlinalg import column_hnf, matvec, solve_integer

small = st.integers(-4, 4)
matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


@given(matrices)
def test_hnf_is_unimodular_factorization(A):
    h = column_hnf(A)
    n = len(A[0])
    AU = [[sum(A[i][k] * h.U[k][j] for k in range(n)) for j in range(n)] for i in range(len(A))]
    assert AU == [list(r) for r in h.H]
    for v in h.kernel_basis():
        assert matvec(A, v) == [0] * len(A)


@given(matrices, st.data())
def test_solution_of_consistent_system(A, data):
    n = len(A[0])
    x0 = data.draw(st.lists(small, min_size=n, max_size=n))
    b = matvec(A, x0)
    x, kernel = solve_integer(A, b)
    assert matvec(A, x) == b
    assert solve_integer(A, b) == (x, kernel)  # deterministic


def test_divisibility_certificate():
    with pytest.raises(Infeasible) as exc:
        solve_integer([[2, 4]], [3])
    assert exc.value.certificate["kind"] == "divisibility"


def test_inconsistent_certificate():
    with pytest.raises(Infeasible) as exc:
        solve_integer([[1, 1], [2, 2]], [1, 3])
    assert exc.value.certificate == {"row": 1, "kind": "inconsistent"}


def test_kernel_rank():
    x, ker = solve_integer([[1, 1, 1]], [1])
    assert matvec([[1, 1, 1]], x) == [1]
    assert len(ker) == 2
