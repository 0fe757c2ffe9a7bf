from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhi.cyclotomic import RootContext, RootDetermination
from qhi.sixj import (build_cR, build_symmetry_matrices, check_duality, check_inverse,
                      check_orthogonality, check_pentagon, check_sixj_relation, check_symmetry,
                      cR_from_x, fermat_residual, perturbed, random_regular_reps, six_x,
                      solve_zeta_prime, zeta_closed_form)

seeds = st.integers(0, 2 ** 31 - 1)


def _draw(N, seed, count=3):
    ctx, d = RootContext(N), RootDetermination(N)
    rng = np.random.default_rng(seed)
    return ctx, d, rng, random_regular_reps(ctx, d, rng, count)


def test_fermat_relation_of_six_x(ctx, det, rng):
    X = six_x(ctx, det, *random_regular_reps(ctx, det, rng, 3))
    assert fermat_residual(ctx.N, X) < 1e-10


@given(seeds)
def test_sixj_relation(seed):
    ctx, d, _, reps = _draw(3, seed)
    assert check_sixj_relation(ctx, d, *reps).passed


@given(seeds, st.sampled_from([3, 5]))
def test_inverse_exact(seed, N):
    ctx, d, _, reps = _draw(N, seed)
    r = check_inverse(ctx, d, *reps)
    assert r.passed and r.root_index == 0


@given(seeds, st.sampled_from([3, 5, 7]), st.integers(0, 6), st.integers(0, 6))
def test_orthogonality_and_bubble(seed, N, a, c):
    ctx, d, _, reps = _draw(N, seed)
    orth, bub = check_orthogonality(ctx, d, *reps, a, c)
    assert orth.passed and bub.passed


@given(seeds, st.lists(st.integers(0, 6), min_size=5, max_size=5))
def test_pentagon(seed, labels):
    ctx, d, _, reps = _draw(3, seed, 4)
    assert check_pentagon(ctx, d, *reps, *labels).passed


def test_pentagon_detects_wrong_charge(ctx, det, rng):
    reps = random_regular_reps(ctx, det, rng, 4)
    good = check_pentagon(ctx, det, *reps, 0, 1, 2, 0, 1)
    assert good.passed
    # the charge labels are not free: shifting a single tensor breaks it
    from qhi import sixj
    orig = sixj.pentagon_charge_labels
    try:
        sixj.pentagon_charge_labels = lambda *a: ((orig(*a)[0][0] + 1, orig(*a)[0][1]),) + orig(*a)[1:]
        assert not check_pentagon(ctx, det, *reps, 0, 1, 2, 0, 1).passed
    finally:
        sixj.pentagon_charge_labels = orig


@given(seeds, st.integers(0, 6), st.integers(0, 6))
def test_duality(seed, a, c):
    ctx, d, _, reps = _draw(3, seed)
    assert check_duality(ctx, d, *reps, a, c).passed


@pytest.mark.parametrize("N", [3, 5, 7])
def test_symmetry_relations(N):
    ctx, d, rng, _ = _draw(N, 4)
    sm = build_symmetry_matrices(ctx)
    for _ in range(5):
        reps = random_regular_reps(ctx, d, rng, 3)
        a, c = (int(v) for v in rng.integers(0, N, 2))
        assert all(r.passed for r in check_symmetry(ctx, d, *reps, a, c, sm=sm))


def test_symmetry_minus_zeta_fails():
    ctx, d, rng, reps = _draw(5, 8)
    sm = perturbed(build_symmetry_matrices(ctx), -1)
    res = check_symmetry(ctx, d, *reps, 1, 2, sm=sm)
    assert res[1].residual > 0.1


@pytest.mark.parametrize("N", [3, 5, 7, 9, 11, 13])
def test_zeta_calibration_keeps_closed_form(N):
    sm = build_symmetry_matrices(RootContext(N))
    assert sm.correction == (1, 0)
    assert abs(sm.zeta - zeta_closed_form(N)) < 1e-12


def test_st_algebra(ctx):
    sm = build_symmetry_matrices(ctx)
    S = sm.S_lower
    assert np.abs(np.linalg.matrix_power(S, 4) - np.eye(ctx.N)).max() < 1e-12
    zp, res = solve_zeta_prime(sm)
    assert res < 1e-9 and abs(abs(zp) - 1) < 1e-9


def test_charge_periodicity(ctx, det, rng):
    X = six_x(ctx, det, *random_regular_reps(ctx, det, rng, 3))
    A = cR_from_x(ctx, X, 1, 2)
    B = cR_from_x(ctx, X, 1 + ctx.N, 2 - ctx.N)
    assert np.array_equal(A, B)


def test_tensor_shape(ctx, det, rng):
    t = build_cR(ctx, det, *random_regular_reps(ctx, det, rng, 3), 0, 0)
    assert t.components.shape == (ctx.N,) * 4
