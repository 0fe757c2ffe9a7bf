from __future__ import annotations

import itertools

from hypothesis import given, strategies as st

from qhi.fixtures import SEED_GLUINGS
from qhi.local import bipyramid, single_tetrahedron, three_star
from qhi.triangulation import (Branching, ParityUnionFind, SingularTriangulation, all_branchings,
                               branching_diagnostics, find_branching, hamiltonian_germs, mirror,
                               perm_compose, perm_inverse, perm_sign, tet_index, tet_order, validate)

perms = st.permutations(range(4)).map(tuple)


def seed():
    return SingularTriangulation(SEED_GLUINGS, (1, 1))


@given(perms, perms)
def test_perm_group_laws(a, b):
    assert perm_compose(a, perm_inverse(a)) == (0, 1, 2, 3)
    assert perm_sign(perm_compose(a, b)) == perm_sign(a) * perm_sign(b)


def test_all_perm_signs():
    signs = [perm_sign(p) for p in itertools.permutations(range(4))]
    assert signs.count(1) == signs.count(-1) == 12


def test_parity_union_find():
    uf = ParityUnionFind(range(4))
    uf.union(0, 1, -1)
    uf.union(1, 2, -1)
    assert uf.find(0) == uf.find(2)
    assert uf.rel(0) * uf.rel(2) == 1


def test_seed_counts():
    tri = seed()
    assert tri.counts() == (1, 3, 4, 2)
    assert tri.is_closed and tri.euler_characteristic() == 0
    assert validate(tri, (0,)) == []
    assert hamiltonian_germs(tri, (0,)) == [2]


def test_local_complexes_are_open():
    for tri in (single_tetrahedron(), bipyramid(), three_star()):
        assert not tri.is_closed
        assert all(d.kind == "boundary" for d in validate(tri))
    assert three_star().counts() == (5, 10, 9, 3)


def test_broken_involution():
    g = [list(r) for r in SEED_GLUINGS]
    g[0][0] = (0, (0, 1, 2, 3))
    kinds = {d.kind for d in validate(SingularTriangulation(tuple(map(tuple, g)), (1, 1)))}
    assert "involution" in kinds


def test_orientation_mismatch():
    kinds = {d.kind for d in validate(SingularTriangulation(SEED_GLUINGS, (1, -1)))}
    assert "orientation" in kinds


def test_branching_search_is_valid():
    tri = seed()
    b = find_branching(tri)
    assert branching_diagnostics(tri, b) == []
    every = all_branchings(tri)
    assert b in every and len(set(every)) == len(every)


def test_bad_branching_is_reported():
    tri = seed()
    good = find_branching(tri)
    bad = [Branching(tuple(d)) for d in itertools.product((1, -1), repeat=tri.r1)
           if Branching(tuple(d)) not in all_branchings(tri)]
    for b in bad:
        assert branching_diagnostics(tri, b)
    assert good not in bad


def test_tet_order_and_index():
    tri = seed()
    b = find_branching(tri)
    for t in range(tri.n_tets):
        order = tet_order(tri, b, t)
        assert sorted(order) == [0, 1, 2, 3]
        for a in range(4):
            for c in range(a + 1, 4):
                assert b.local(tri, t, order[a], order[c]) == 1
        assert tet_index(mirror(tri), b, t) == -tet_index(tri, b, t)


def test_hamiltonian_germ_count():
    tri = seed()
    kinds = [d.kind for d in validate(tri, (1, 2))]
    assert "hamiltonian" in kinds
