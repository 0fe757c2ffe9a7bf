from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhi.cyclotomic import (FermatPoint, RootContext, RootDetermination, bracket, g_func, h_func,
                            omega_fermat, omega_fermat2, omega_fermat_table, rogers_dilog,
                            five_term_residual)
from qhi.errors import BranchCutError, OffCurveError, PoleError

odd = st.integers(1, 6).map(lambda p: 2 * p + 1)


@pytest.mark.parametrize("bad", [1, 2, 4, 0, -3, 3.0])
def test_context_rejects_even_or_small(bad):
    with pytest.raises(ValueError):
        RootContext(bad)


@given(odd)
def test_half_and_quarter_are_inverses(N):
    ctx = RootContext(N)
    assert (2 * ctx.half) % N == 1
    assert (4 * ctx.quarter) % N == 1
    assert (8 * ctx.eighth) % N == 1


@given(odd, st.integers(-50, 50))
def test_w_is_periodic_power(N, k):
    ctx = RootContext(N)
    assert ctx.w(k) == ctx.w(k + N)
    assert abs(ctx.w(k) - ctx.omega ** k) < 1e-12


def _point(ctx, rng):
    x, y = rng.normal(size=2) + 1j * rng.normal(size=2)
    z = RootDetermination(ctx.N).root(x ** ctx.N + y ** ctx.N)
    return FermatPoint(x, y, z)


def test_omega_fermat_is_N_periodic(ctx, rng):
    pt = _point(ctx, rng)
    assert omega_fermat(ctx, pt, 0) == 1
    # the full product over one period is 1 on the curve
    full = 1 + 0j
    for j in range(1, ctx.N + 1):
        full *= pt.y / (pt.z - pt.x * ctx.w(j))
    assert abs(full - 1) < 1e-10
    table = omega_fermat_table(ctx, pt)
    for n in range(ctx.N):
        assert abs(table[n] - omega_fermat(ctx, pt, n + ctx.N)) < 1e-10 * max(1, abs(table[n]))


def test_omega_fermat_checks_curve(ctx):
    with pytest.raises(OffCurveError):
        omega_fermat(ctx, FermatPoint(1.0, 1.0, 1.0), 1)


def test_omega_fermat_pole(ctx):
    # z = x omega hits the first factor; y = 0 keeps the point on the curve
    with pytest.raises(PoleError):
        omega_fermat(ctx, FermatPoint(1.0, 0.0, ctx.omega), 1)


def test_omega_two_argument_form(ctx, rng):
    pt = _point(ctx, rng)
    for m, n in [(0, 0), (2, 1), (1, 2)]:
        assert omega_fermat2(ctx, pt, m, n) == omega_fermat(ctx, pt, m - n) * ctx.w_half_square(n)


def test_g_at_zero_is_one(ctx):
    assert g_func(ctx, 0.0) == 1


def test_g_against_mpmath(ctx):
    x = 0.3 - 0.2j
    ref = mpmath.mpf(1)
    for j in range(1, ctx.N):
        ref *= mpmath.power(1 - x * mpmath.exp(2j * mpmath.pi * j / ctx.N), mpmath.mpf(j) / ctx.N)
    assert abs(g_func(ctx, x) - complex(ref)) < 1e-12


def test_h_regularity(ctx):
    with pytest.raises(PoleError):
        h_func(ctx, 0)
    assert abs(h_func(ctx, 1.0) - 1) < 1e-12


def test_bracket_values(ctx):
    assert bracket(ctx, 1.0) == 1
    x = 0.4 + 0.1j
    assert abs(bracket(ctx, x) - (1 - x ** ctx.N) / (ctx.N * (1 - x))) < 1e-14


@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_root_determination(v):
    for N in (3, 5, 7):
        for seed in (None, 1):
            d = RootDetermination(N, seed)
            r = d.root(v)
            assert abs(r ** N - v) < 1e-10 * abs(v)
            assert d.root(v) == r


def test_root_seed_changes_some_roots():
    vals = [complex(k, 1) for k in range(20)]
    a = [RootDetermination(5).root(v) for v in vals]
    b = [RootDetermination(5, 3).root(v) for v in vals]
    assert a != b


@pytest.mark.parametrize("z", [0.3, 0.5 + 0.4j, -0.2 - 0.1j, 0.9j])
def test_rogers_against_mpmath(z):
    ref = 0.5 * cmath.log(z) * cmath.log(1 - z) + complex(mpmath.polylog(2, z))
    assert abs(rogers_dilog(z, shifted=False) - ref) < 1e-11
    assert abs(rogers_dilog(z) - (ref - math.pi ** 2 / 6)) < 1e-11


def test_rogers_special_values():
    assert abs(rogers_dilog(0.5, shifted=False) - math.pi ** 2 / 12) < 1e-12
    assert abs(rogers_dilog(1.0, shifted=False) - math.pi ** 2 / 6) < 1e-15


@pytest.mark.parametrize("z", [-1.0, 2.0])
def test_rogers_cut(z):
    with pytest.raises(BranchCutError):
        rogers_dilog(z)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_five_term(x, y):
    assert five_term_residual(x, y) < 1e-9


def test_shifted_five_term_is_off_by_pi2_over_6():
    assert abs(five_term_residual(0.3, 0.6, shifted=True) - math.pi ** 2 / 6) < 1e-10
