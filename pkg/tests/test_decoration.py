from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhi.cyclotomic import RootContext
from qhi.decoration import (BCocycle, IntegralCharge, b_inv, b_mul, b_pow, charge_kernel,
                            charge_lattice_vector, cocycle_from_abelian, curve_alpha, curve_sigma,
                            edge_sums, gauge_transform, is_full, lattice_delta, random_gauge,
                            reduce_charge_mod_N, restore_fullness, solve_charges, transit_cocycle,
                            transit_decoration, validate_charge, validate_cocycle)
from qhi.errors import Infeasible, NotACocycle
from qhi.fixtures import SEED_CLASS, fixture_catalog, get_fixture
from qhi.intlinalg import solve_integer
from qhi.local import single_tetrahedron, three_star, is_interior_edge, order_branching
from qhi.moves import apply_move, candidate_sites
from qhi.triangulation import SingularTriangulation

belems = st.tuples(st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False,
                                      allow_infinity=False),
                   st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))


def _close(a, b, tol=1e-9):
    return all(abs(x - y) <= tol * max(1, abs(x), abs(y)) for x, y in zip(a, b))


@given(belems, belems, belems)
def test_b_group_laws(a, b, c):
    assert _close(b_mul(b_mul(a, b), c), b_mul(a, b_mul(b, c)))
    assert _close(b_mul(a, b_inv(a)), (1, 0))
    assert _close(b_pow(a, 3), b_mul(a, b_mul(a, a)))
    assert _close(b_mul(b_pow(a, -2), b_pow(a, 2)), (1, 0))


def test_fixture_cocycles_validate():
    for doc in fixture_catalog():
        assert validate_cocycle(doc.tri, doc.branching, doc.cocycle) == []


def test_gauge_identity_and_inverse(rng):
    doc = get_fixture("s14")
    z = doc.cocycle
    assert gauge_transform(doc.tri, z, {0: (1, 0)}).values == z.values
    g = random_gauge(rng)
    back = gauge_transform(doc.tri, gauge_transform(doc.tri, z, {1: g}), {1: b_inv(g)})
    assert all(_close(u, v) for u, v in zip(back.values, z.values))


def test_gauge_preserves_cocycle_condition(rng):
    doc = get_fixture("s14_23")
    for _ in range(5):
        z = gauge_transform(doc.tri, doc.cocycle, {v: random_gauge(rng) for v in range(doc.tri.r0)})
        assert [d for d in validate_cocycle(doc.tri, doc.branching, z) if d.kind == "cocycle"] == []


def test_restore_fullness(rng):
    doc = get_fixture("s14")
    assert restore_fullness(doc.tri, doc.cocycle, rng) is doc.cocycle
    # an edge between distinct vertices can be zeroed by a gauge
    e = next(ec.index for ec in doc.tri.edge_classes if len(set(ec.endpoints)) == 2)
    v0, v1 = doc.tri.edge_classes[e].endpoints
    t, x = doc.cocycle.values[e]
    z = gauge_transform(doc.tri, doc.cocycle, {v1: (1, -x / t)})
    assert abs(z.values[e][1]) < 1e-12 and not is_full(z)
    fixed = restore_fullness(doc.tri, z, rng)
    assert is_full(fixed)
    assert [d for d in validate_cocycle(doc.tri, doc.branching, fixed) if d.kind == "cocycle"] == []
    assert len(fixed.gauge_log) > len(z.gauge_log)


def test_abelian_builders():
    tri = get_fixture("seed").tri
    z, warn = cocycle_from_abelian(tri, "additive", [0] * tri.r1)
    assert all(v == (1, 0) for v in z.values) and warn
    z, warn = cocycle_from_abelian(tri, "multiplicative", SEED_CLASS, lam=2j * np.pi / 5)
    assert warn and all(abs(t ** 5 - 1) < 1e-12 for t, _ in z.values)
    z, warn = cocycle_from_abelian(tri, "additive", [1.5 * u for u in SEED_CLASS])
    assert not warn and validate_cocycle(tri, None, z) == []
    with pytest.raises(NotACocycle):
        cocycle_from_abelian(tri, "additive", [1, 1, 1])


def test_single_tetrahedron_charge():
    c = solve_charges(single_tetrahedron(), ())
    assert sum(c.values[0]) == 1
    assert IntegralCharge(((1, 0, 0),)).values == ((1, 0, 0),)


def test_fixture_charges_audit():
    for doc in fixture_catalog():
        c = solve_charges(doc.tri, doc.H)
        assert validate_charge(doc.tri, doc.H, c) == []
        Hs = set(doc.H)
        assert edge_sums(doc.tri, c) == [0 if e in Hs else 2 for e in range(doc.tri.r1)]
        assert solve_charges(doc.tri, doc.H) == c


def test_infeasible_charge_names_edge():
    tri = get_fixture("seed").tri
    with pytest.raises(Infeasible) as exc:
        solve_charges(tri, (0, 1, 2))  # every edge in H: face sums force 2 r3 = 0
    assert "edge" in exc.value.certificate


def test_lattice_vector_preserves_charges():
    for doc in fixture_catalog()[:5]:
        for e in range(doc.tri.r1):
            w = charge_lattice_vector(doc.tri, doc.branching, e)
            d = lattice_delta(doc.tri, doc.branching, w)
            c2 = doc.charge + d
            assert validate_charge(doc.tri, doc.H, c2) == []
            assert c2 - d == doc.charge


def test_lattice_vector_generates_star_kernel():
    # around the interior edge of the three-tetrahedron star, fixing every
    # edge sum leaves exactly the multiples of w(e)
    tri = three_star()
    b = order_branching(tri, range(tri.r0))
    e = next(k for k in range(tri.r1) if is_interior_edge(tri, k))
    d = lattice_delta(tri, b, charge_lattice_vector(tri, b, e))
    A = []
    for ec in tri.edge_classes:
        row = [0] * 6
        for t, k, _ in ec.members:
            from qhi.decoration import PAIR
            if PAIR[k] == 2:
                row[2 * t] -= 1
                row[2 * t + 1] -= 1
            else:
                row[2 * t + PAIR[k]] += 1
        A.append(row)
    _, ker = solve_integer(A, [0] * len(A), 6)
    flat = [v for trip in d.values for v in trip[:2]]
    assert len(ker) == 1
    assert flat in (ker[0], [-v for v in ker[0]])


def test_charge_kernel_is_homogeneous():
    doc = get_fixture("s02")
    for k in charge_kernel(doc.tri, doc.H):
        assert all(sum(t) == 0 for t in k.values)
        assert edge_sums(doc.tri, k) == [0] * doc.tri.r1


@given(st.integers(1, 6), st.lists(st.integers(-9, 9), min_size=2, max_size=2))
def test_reduce_mod_N(p, ab):
    N = 2 * p + 1
    ctx = RootContext(N)
    a, b = ab
    c = IntegralCharge(((a, b, 1 - a - b),))
    red = reduce_charge_mod_N(ctx, c)[0]
    assert sum(red) % N == ctx.half
    shifted = IntegralCharge(((a + 2 * N, b - 2 * N, 1 - a - b),))
    assert reduce_charge_mod_N(ctx, shifted) == (red,)


def test_reduce_mod_3_example():
    assert reduce_charge_mod_N(RootContext(3), IntegralCharge(((1, 0, 0),))) == ((2, 0, 0),)


def test_2_3_transit_agrees_on_common_edges(rng):
    doc = get_fixture("s14")
    site = candidate_sites(doc.tri, doc.H, "2-3")[0]
    m = apply_move(doc.tri, doc.H, doc.branching, "2-3", site)
    z2, c2 = transit_decoration(m, doc.cocycle, doc.charge, rng)
    assert validate_cocycle(m.tri, m.branching, z2) == []
    for oe, images in m.edge_map.items():
        for ne, par in images:
            v = z2.values[ne] if par > 0 else b_inv(z2.values[ne])
            assert _close(v, doc.cocycle.values[oe])
    assert validate_charge(m.tri, m.H, c2) == []


def test_1_4_transit_charge_on_new_H(rng):
    doc = get_fixture("seed")
    m = apply_move(doc.tri, doc.H, doc.branching, "1-4", candidate_sites(doc.tri, doc.H, "1-4")[0])
    z2 = transit_cocycle(m, doc.cocycle, rng)
    c2 = solve_charges(m.tri, m.H, {t: doc.charge.values[t] for t in range(m.old.n_tets)
                                    if t not in m.removed})
    assert validate_cocycle(m.tri, m.branching, z2) == []
    assert all(s == 0 for e, s in enumerate(edge_sums(m.tri, c2)) if e in m.H)


# ---------------------------------------------------------------- curve conditions


def _tet_walk(tri, start=(0, 0)):
    states, seen = [], {}
    t, fin = start
    while (t, fin) not in seen:
        seen[(t, fin)] = len(states)
        fout = (fin + 1) % 4
        states.append((t, fin, fout))
        u, perm = tri.gluings[t][fout]
        t, fin = u, perm[fout]
    return states[seen[(t, fin)]:]


def _link_walk(tri, start=(0, 0, 1)):
    states, seen = [], {}
    t, v, fin = start
    while (t, v, fin) not in seen:
        seen[(t, v, fin)] = len(states)
        fout = min({0, 1, 2, 3} - {v, fin})
        states.append((t, v, fin, fout))
        u, perm = tri.gluings[t][fout]
        t, v, fin = u, perm[v], perm[fout]
    return states[seen[(t, v, fin)]:]


def test_alpha_selects_common_edge():
    c = IntegralCharge(((4, -1, -2),))
    tri = single_tetrahedron()
    assert curve_alpha(tri, c, [(0, 0, 1)]) == c.edge(0, 2, 3) == 4
    assert curve_alpha(tri, c, [(0, 1, 3)]) == c.edge(0, 0, 2) == -1


def test_sigma_sign_flips_with_direction():
    c = IntegralCharge(((4, -1, -2),))
    tri = single_tetrahedron()
    assert curve_sigma(tri, c, [(0, 0, 1, 2)]) == c.edge(0, 0, 3)
    assert curve_sigma(tri, c, [(0, 0, 2, 1)]) == -c.edge(0, 0, 3)


def test_closed_curves_on_fixtures():
    for doc in fixture_catalog():
        steps = _tet_walk(doc.tri)
        a = curve_alpha(doc.tri, doc.charge, steps)
        k = charge_kernel(doc.tri, doc.H)
        twice = doc.charge + (k[0] + k[0] if k else IntegralCharge(((0, 0, 0),) * doc.tri.n_tets))
        assert (curve_alpha(doc.tri, twice, steps) - a) % 2 == 0
        loop = _link_walk(doc.tri)
        rev = [(t, v, fout, fin) for t, v, fin, fout in reversed(loop)]
        assert curve_sigma(doc.tri, doc.charge, rev) == -curve_sigma(doc.tri, doc.charge, loop)


def test_broken_chain_rejected():
    tri = get_fixture("seed").tri
    steps = _tet_walk(tri)
    bad = [steps[0], (steps[0][0], 3, 2)]
    with pytest.raises(ValueError):
        curve_alpha(tri, get_fixture("seed").charge, bad)
    with pytest.raises(ValueError):
        curve_alpha(tri, get_fixture("seed").charge, [(0, 1, 1)])


def test_small_link_loop_sigma_is_edge_sum():
    # a link curve circling one endpoint of an edge meets every corner of that
    # edge once with the same sign, so |sigma| is the edge sum
    hits = 0
    for doc in fixture_catalog():
        tri, sums = doc.tri, edge_sums(doc.tri, doc.charge)
        for t in range(tri.n_tets):
            for v in range(4):
                for fin in set(range(4)) - {v}:
                    loop = _link_walk(tri, (t, v, fin))
                    cls = {tri.edge_class_of(u, a, ({0, 1, 2, 3} - {a, b, c}).pop())[0]
                           for u, a, b, c in loop}
                    if len(cls) == 1:
                        hits += 1
                        assert abs(curve_sigma(tri, doc.charge, loop)) == sums[cls.pop()]
    assert hits > 50
