from __future__ import annotations

import numpy as np
import pytest

from qhi.cyclotomic import RootContext, RootDetermination
from qhi.decoration import validate_charge, validate_cocycle
from qhi.local import (bipyramid, local_mirror_residual, local_move_residual,
                       random_local_decoration, single_tetrahedron, three_star)


@pytest.mark.parametrize("build", [single_tetrahedron, bipyramid, three_star])
def test_random_local_decoration(build, rng):
    tri = build()
    dec = random_local_decoration(tri, rng)
    assert validate_cocycle(tri, dec.b, dec.z) == []
    assert validate_charge(tri, (), dec.c) == []


@pytest.mark.parametrize("kind", ["2-3", "1-4", "0-2"])
def test_local_moves(kind, N):
    ctx, d = RootContext(N), RootDetermination(N)
    rng = np.random.default_rng(N)
    for _ in range(3):
        assert local_move_residual(ctx, d, kind, rng) < 1e-9


@pytest.mark.parametrize("build", [single_tetrahedron, bipyramid, three_star])
def test_local_mirror(build, N):
    ctx, d = RootContext(N), RootDetermination(N)
    assert local_mirror_residual(ctx, d, build(), np.random.default_rng(3)) < 1e-9


def test_local_check_has_teeth(monkeypatch):
    from qhi import local
    ctx, d = RootContext(3), RootDetermination(3)
    orig = local.local_charge_transit

    def wrong(move, c):
        c2 = orig(move, c)
        v = list(map(list, c2.values))
        v[-1][0] += 1
        v[-1][1] -= 1
        return type(c2)(tuple(map(tuple, v)))

    monkeypatch.setattr(local, "local_charge_transit", wrong)
    res = [local_move_residual(ctx, d, "2-3", np.random.default_rng(k)) for k in range(3)]
    assert max(res) > 1e-3
