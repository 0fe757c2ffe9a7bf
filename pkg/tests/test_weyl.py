from __future__ import annotations

import numpy as np
import pytest

from qhi.errors import NotRegularError
from qhi.sixj import random_regular_reps
from qhi.weyl import (StandardRep, cgo, conjugate_rep, coproduct, equivalent, inverse_rep,
                      product_power, product_rep, weyl_matrices)


def test_rep_rejects_zero():
    with pytest.raises(ValueError):
        StandardRep(0, 1)
    with pytest.raises(ValueError):
        StandardRep(1, 0)


def test_weyl_relation(ctx):
    E, D = weyl_matrices(ctx, StandardRep(1.1 + 0.2j, 0.7 - 0.3j))
    assert np.abs(E @ D - ctx.omega * D @ E).max() < 1e-12 * np.abs(E @ D).max()


def test_product_rep_power(ctx, det, rng):
    p, q = random_regular_reps(ctx, det, rng, 3)[:2]
    pq = product_rep(ctx, det, p, q)
    assert abs(pq.x ** ctx.N - product_power(ctx.N, p, q)) < 1e-10 * abs(pq.x) ** ctx.N
    assert pq.t == p.t * q.t


def test_product_rep_rejects_bad_x(ctx, det):
    p, q = StandardRep(1.0, 1.0), StandardRep(1.2, 0.5)
    with pytest.raises(NotRegularError):
        product_rep(ctx, det, p, q, x_pq=7.0)


def test_irregular_pair(ctx, det):
    # x_q^N = -1, so t_p^N x_q^N + x_p^N / t_q^N = -1 + 1 = 0
    q = StandardRep(1.0, np.exp(1j * np.pi / ctx.N))
    with pytest.raises(NotRegularError):
        product_rep(ctx, det, StandardRep(1.0, 1.0), q)


def test_equivalence_up_to_roots(ctx):
    p = StandardRep(1.3 + 0.1j, 0.4 + 0.8j)
    q = StandardRep(p.t * ctx.omega, p.x * ctx.omega ** 2)
    assert equivalent(p, q, ctx.N)
    assert not equivalent(p, StandardRep(p.t, 2 * p.x), ctx.N)


def test_inverse_and_conjugate():
    p = StandardRep(2.0 + 1j, 0.5 - 1j)
    assert inverse_rep(inverse_rep(p)) == p
    assert conjugate_rep(p).x == p.x.conjugate()


def test_cgo_intertwines(ctx, det, rng):
    p, q = random_regular_reps(ctx, det, rng, 3)[:2]
    pq = product_rep(ctx, det, p, q)
    E, D = coproduct(ctx, p, q)
    Epq, Dpq = weyl_matrices(ctx, pq)
    for a in range(ctx.N):
        K = cgo(ctx, det, p, q, a).as_operator()
        scale = np.abs(K).max()
        assert np.abs(E @ K - K @ Epq).max() < 1e-10 * scale * np.abs(E).max()
        assert np.abs(D @ K - K @ Dpq).max() < 1e-10 * scale * np.abs(D).max()


def test_cgo_family_is_a_basis(ctx, det, rng):
    p, q = random_regular_reps(ctx, det, rng, 3)[:2]
    ops = np.hstack([cgo(ctx, det, p, q, a).as_operator() for a in range(ctx.N)])
    assert np.linalg.matrix_rank(ops) == ctx.N ** 2
