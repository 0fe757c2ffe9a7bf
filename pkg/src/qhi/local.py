"""Move invariance on small open complexes with generic decorations.

On a closed fixture the cocycle is pinned by the holonomy of the seed. Here
the complex is a ball whose vertices are all distinct, so a random vertex
coboundary gives a full, non-abelian cocycle. The boundary faces stay open,
and the move must preserve the boundary tensor
``N^-r0 * contraction * prod_{e not in H} y(e)^-2p`` up to an N-th root of unity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclotomic import RootContext, RootDetermination
from .decoration import (PAIR, BCocycle, IntegralCharge, edge_sums, gauge_transform,
                         random_gauge, transit_cocycle)
from .errors import NotApplicable
from .intlinalg import solve_integer
from .moves import MoveResult, apply_move, candidate_sites, move_2_3
from .statesum import assemble_network, contract_open, edge_y, to_cutopen
from .triangulation import (Branching, SingularTriangulation, branching_diagnostics, is_interior_edge,
                            mirror)


def single_tetrahedron() -> SingularTriangulation:
    return SingularTriangulation(((None,) * 4,), (1,))


def bipyramid() -> SingularTriangulation:
    """Two tetrahedra glued along one face; apexes are vertices 0 and 4."""
    g = [[None] * 4, [None] * 4]
    g[0][0] = (1, (3, 0, 1, 2))
    g[1][3] = (0, (1, 2, 3, 0))
    return SingularTriangulation(tuple(map(tuple, g)), (1, 1))


def three_star() -> SingularTriangulation:
    """Three tetrahedra around one interior edge (the bipyramid after a 2 -> 3)."""
    tri = bipyramid()
    return move_2_3(tri, (), None, tri.face_of[(0, 0)]).tri


def order_branching(tri: SingularTriangulation, rank) -> Branching:
    """Orient every edge from lower to higher ``rank`` of its endpoints."""
    dirs = []
    for ec in tri.edge_classes:
        v0, v1 = ec.endpoints
        dirs.append(1 if rank[v0] < rank[v1] else -1)
    return Branching(tuple(dirs))


@dataclass(frozen=True)
class LocalDecoration:
    tri: SingularTriangulation
    H: tuple[int, ...]
    b: Branching
    z: BCocycle
    c: IntegralCharge


def random_local_decoration(tri: SingularTriangulation, rng: np.random.Generator, H=()
                            ) -> LocalDecoration:
    if tri.reversed_edges or any(len(set(ec.endpoints)) < 2 for ec in tri.edge_classes):
        raise NotApplicable("local complexes need distinct endpoints on every edge")
    b = order_branching(tri, rng.permutation(tri.r0))
    assert not branching_diagnostics(tri, b)
    ident = BCocycle(tuple((1 + 0j, 0j) for _ in range(tri.r1)))
    z = gauge_transform(tri, ident, {v: random_gauge(rng, 1.0) for v in range(tri.r0)})
    # interior edges sum to 2 (0 on H); the rest is a random kernel element
    Hs = set(H)
    A, rhs = [], []
    for ec in tri.edge_classes:
        if not is_interior_edge(tri, ec.index):
            continue
        row, const = [0] * (2 * tri.n_tets), 0
        for t, k, _ in ec.members:
            pair = PAIR[k]
            if pair == 2:
                const += 1
                row[2 * t] -= 1
                row[2 * t + 1] -= 1
            else:
                row[2 * t + pair] += 1
        A.append(row)
        rhs.append((0 if ec.index in Hs else 2) - const)
    x, kernel = solve_integer(A, rhs, 2 * tri.n_tets)
    for v in kernel:
        k = int(rng.integers(-2, 3))
        x = [a + k * b_ for a, b_ in zip(x, v)]
    vals = [(x[2 * t], x[2 * t + 1], 1 - x[2 * t] - x[2 * t + 1]) for t in range(tri.n_tets)]
    return LocalDecoration(tri, tuple(H), b, z, IntegralCharge(tuple(vals)))


def local_charge_transit(move: MoveResult, c: IntegralCharge) -> IntegralCharge:
    """Keep surviving tetrahedra; new edge sums follow the closed rule relative to the old ones.

    An old boundary edge keeps its sum, shifted by 2 when it leaves H and by
    -2 when it joins; the two halves of a split boundary edge share the old
    sum plus 2. Interior and brand-new edges get 2 (0 on H).
    """
    old, new = move.old, move.tri
    removed = set(move.removed)
    survivors = [t for t in range(old.n_tets) if t not in removed]
    fixed = {new_t: c.values[t] for new_t, t in zip(survivors, survivors)}
    Hold, Hnew = set(move.H_old), set(move.H)
    sums = edge_sums(old, c)
    groups = []  # (new edges, target)
    covered = set()
    for oe, images in move.edge_map.items():
        es = [ne for ne, _ in images]
        covered.update(es)
        if is_interior_edge(old, oe):
            groups.extend(([ne], 0 if ne in Hnew else 2) for ne in es)
            continue
        target = sums[oe] + 2 * (len(es) - 1)
        target += 2 * sum((oe in Hold) - (ne in Hnew) for ne in es)
        groups.append((es, target))
    for ne in range(new.r1):
        if ne not in covered:
            groups.append(([ne], 0 if ne in Hnew else 2))
    free = [t for t in range(new.n_tets) if t not in fixed]
    col = {t: k for k, t in enumerate(free)}
    A, rhs = [], []
    for es, target in groups:
        row, const = [0] * (2 * len(free)), 0
        for e in es:
            for t, k, _ in new.edge_classes[e].members:
                pair = PAIR[k]
                if t in fixed:
                    const += fixed[t][pair]
                elif pair == 2:
                    const += 1
                    row[2 * col[t]] -= 1
                    row[2 * col[t] + 1] -= 1
                else:
                    row[2 * col[t] + pair] += 1
        A.append(row)
        rhs.append(target - const)
    x, _ = solve_integer(A, rhs, 2 * len(free))
    vals = dict(fixed)
    for k, t in enumerate(free):
        vals[t] = (x[2 * k], x[2 * k + 1], 1 - x[2 * k] - x[2 * k + 1])
    return IntegralCharge(tuple(vals[t] for t in range(new.n_tets)))


def boundary_value(ctx: RootContext, d: RootDetermination, dec: LocalDecoration):
    """Normalized boundary tensor and, per open axis, the set of its face's vertices."""
    tri = dec.tri
    inp = to_cutopen(ctx, d, tri, dec.H, dec.b, dec.z, dec.c, check=False)
    T, labels = contract_open(assemble_network(ctx, inp))
    Hs = set(dec.H)
    w = 1 + 0j
    for e in range(tri.r1):
        if e not in Hs:
            w *= edge_y(dec.b, dec.z, d, e) ** (-2 * ctx.p)
    keys = []
    for lab in labels:
        (t, f), = tri.face_classes[lab]
        keys.append(frozenset(tri.vertex_of[(t, v)] for v in range(4) if v != f))
    return T * w * float(ctx.N) ** (-tri.r0), keys


def local_move_residual(ctx: RootContext, d: RootDetermination, kind: str,
                        rng: np.random.Generator) -> float:
    """Relative change of the boundary tensor under one move, minimized over N-th roots."""
    if kind == "2-3":
        tri, H = bipyramid(), ()
    elif kind == "1-4":
        tri = single_tetrahedron()
        H = (tri.edge_class_of(0, 0, 1)[0],)
    elif kind == "0-2":
        tri, H = three_star(), ()
    else:
        raise ValueError(f"unknown move {kind!r}")
    dec = random_local_decoration(tri, rng, H)
    site = next(s for s in candidate_sites(tri, H, kind) if _applies(dec, kind, s))
    move = apply_move(tri, H, dec.b, kind, site)
    z2 = transit_cocycle(move, dec.z, rng)
    c2 = local_charge_transit(move, dec.c)
    new = LocalDecoration(move.tri, tuple(move.H), move.branching, z2, c2)
    T1, k1 = boundary_value(ctx, d, dec)
    T2, k2 = boundary_value(ctx, d, new)
    vmap = {ov: nv[0] for ov, nv in move.vertex_map.items()}
    k1 = [frozenset(vmap[v] for v in k) for k in k1]
    T2 = T2.transpose([k2.index(k) for k in k1])
    scale = np.abs(T1).max()
    return min(float(np.abs(T1 - ctx.w(k) * T2).max()) for k in range(ctx.N)) / scale


def _applies(dec: LocalDecoration, kind: str, site) -> bool:
    try:
        apply_move(dec.tri, dec.H, dec.b, kind, site)
        return True
    except (NotApplicable, KeyError, TypeError):
        return False


def local_mirror_residual(ctx: RootContext, d: RootDetermination, tri: SingularTriangulation,
                          rng: np.random.Generator) -> float:
    """Mirror with the conjugate cocycle against the conjugate boundary tensor.

    Boundary states are negated on one side, and the comparison is up to an
    N-th root because the determination is not conjugation-equivariant.
    """
    dec = random_local_decoration(tri, rng)
    T, _ = boundary_value(ctx, d, dec)
    m = LocalDecoration(mirror(tri), dec.H, dec.b, dec.z.conjugate(), dec.c)
    Tm, _ = boundary_value(ctx, d, m)
    neg = (-np.arange(ctx.N)) % ctx.N
    ref = np.conj(T[np.ix_(*[neg] * T.ndim)])
    scale = np.abs(ref).max()
    return min(float(np.abs(ref - ctx.w(k) * Tm).max()) for k in range(ctx.N)) / scale
