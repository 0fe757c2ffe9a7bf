"""Positive moves 2->3, 0->2 and 1->4 with combinatorial transit of H and branching.

Every move is expressed as the removal of some tetrahedra, the insertion of
new ones with prescribed internal gluings, and a list of bindings that say
how the new boundary slots meet the rest of the complex:

* ``replace``: the new slot takes over a removed tetrahedron's slot, and is
  glued to whatever that slot was glued to (the vertex map composes);
* ``attach``: the new slot is glued directly onto a surviving slot, which
  drops its previous partner.

Surviving tetrahedra keep their indices, removed indices are reused by the
first new tetrahedra, and further new ones are appended.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import NotApplicable
from .triangulation import (EDGES, Branching, SingularTriangulation, branching_diagnostics,
                            perm_compose, perm_inverse, perm_sign)

IDENTITY = (0, 1, 2, 3)


def _transposition(k: int, l: int):
    p = list(IDENTITY)
    p[k], p[l] = l, k
    return tuple(p)


@dataclass
class _Plan:
    removed: list[int]
    n_new: int
    internal: dict  # (new, face) -> (new, perm)
    replace: dict = field(default_factory=dict)  # (new, face) -> (old tet, old face, phi)
    attach: dict = field(default_factory=dict)  # (new, face) -> (surviving tet, perm)
    orientation: dict = field(default_factory=dict)  # new -> sign


@dataclass(frozen=True)
class MoveResult:
    kind: str
    site: tuple
    old: SingularTriangulation
    tri: SingularTriangulation
    H: tuple[int, ...]
    branching: Branching | None
    removed: tuple[int, ...]
    new_tets: tuple[int, ...]
    edge_map: dict  # old class -> tuple of (new class, parity of new rep vs old rep)
    new_edges: tuple[int, ...]
    vertex_map: dict
    new_vertices: tuple[int, ...]
    branching_choices: int = 1
    H_old: tuple[int, ...] = ()

    def image(self, old_edge: int) -> tuple[int, ...]:
        return tuple(e for e, _ in self.edge_map[old_edge])


def _rebuild(tri: SingularTriangulation, plan: _Plan):
    """Apply a plan; returns the new complex and the old->new tet index map for new tets."""
    n_old = tri.n_tets
    removed = sorted(plan.removed)
    if plan.n_new < len(removed):
        raise NotImplementedError("positive moves never shrink the complex")
    new_index = removed + list(range(n_old, n_old + plan.n_new - len(removed)))
    total = n_old - len(removed) + plan.n_new
    gl = [list(row) for row in tri.gluings] + [[None] * 4 for _ in range(total - n_old)]
    orient = list(tri.orientation) + [0] * (total - n_old)
    for t in removed:
        gl[t] = [None] * 4
    ni = lambda k: new_index[k]

    def put(t, f, u, perm):
        gl[t][f] = (u, tuple(perm))
        gl[u][perm[f]] = (t, perm_inverse(perm))

    for (k, f), (k2, perm) in plan.internal.items():
        put(ni(k), f, ni(k2), perm)
    for (k, f), (u, perm) in plan.attach.items():
        put(ni(k), f, u, perm)
    for (k, f), (ot, of, phi) in plan.replace.items():
        if tri.gluings[ot][of] is None:  # boundary face stays open
            gl[ni(k)][f] = None
            continue
        u, perm = tri.gluings[ot][of]
        target = perm[of]
        if u in set(removed):
            hit = [(k2, f2, phi2) for (k2, f2), (ot2, of2, phi2) in plan.replace.items()
                   if (ot2, of2) == (u, target)]
            if not hit:
                raise NotApplicable("removed slot glued to an unbound removed slot")
            k2, f2, phi2 = hit[0]
            gl[ni(k)][f] = (ni(k2), perm_compose(perm_inverse(phi2), perm_compose(perm, phi)))
        else:
            put(ni(k), f, u, perm_compose(perm, phi))
    for k, s in plan.orientation.items():
        orient[ni(k)] = s
    new = SingularTriangulation(tuple(tuple(r) for r in gl), tuple(orient))
    diags = [d for d in new.structural_diagnostics() if d.kind != "boundary" or tri.is_closed]
    if diags:
        raise NotApplicable("move produced an invalid complex: "
                            + "; ".join(d.message for d in diags[:3]))
    return new, new_index


def _correspondence(old: SingularTriangulation, new: SingularTriangulation, plan: _Plan,
                    new_index: list[int]):
    """Edge and vertex maps via surviving abstract cells and replaced faces."""
    removed = set(plan.removed)
    # (old tet, old local vertex) -> (new tet, new local vertex)
    pairs = [((t, v), (t, v)) for t in range(old.n_tets) if t not in removed for v in range(4)]
    for (k, f), (ot, of, phi) in plan.replace.items():
        for v in range(4):
            if v != f:
                pairs.append(((ot, phi[v]), (new_index[k], v)))
    vmap: dict = {}
    for (ot, ov), (nt, nv) in pairs:
        vmap.setdefault(old.vertex_of[(ot, ov)], set()).add(new.vertex_of[(nt, nv)])
    emap: dict = {}
    edge_pairs = [((t, i, j), (t, i, j)) for t in range(old.n_tets) if t not in removed
                  for i, j in EDGES]
    for (k, f), (ot, of, phi) in plan.replace.items():
        for i, j in EDGES:
            if f not in (i, j):
                edge_pairs.append(((ot, phi[i], phi[j]), (new_index[k], i, j)))
    for (ot, oi, oj), (nt, ni_, nj) in edge_pairs:
        oc, op = old.edge_class_of(ot, oi, oj)
        nc, np_ = new.edge_class_of(nt, ni_, nj)
        emap.setdefault(oc, set()).add((nc, op * np_))
    edge_map = {}
    for oc in range(old.r1):
        images = sorted(emap.get(oc, ()))
        classes = [c for c, _ in images]
        if len(set(classes)) != len(classes):
            raise NotApplicable(f"edge {oc} maps with inconsistent orientation")
        edge_map[oc] = tuple(images)
    covered = {c for im in edge_map.values() for c, _ in im}
    new_edges = tuple(e for e in range(new.r1) if e not in covered)
    vertex_map = {ov: tuple(sorted(s)) for ov, s in vmap.items()}
    vcovered = {v for s in vertex_map.values() for v in s}
    new_vertices = tuple(v for v in range(new.r0) if v not in vcovered)
    return edge_map, new_edges, vertex_map, new_vertices


def _transit_branching(old_b: Branching | None, new: SingularTriangulation, edge_map,
                       new_edges, choice: int):
    """Inherit directions, then take the ``choice``-th legal assignment of new edges."""
    if old_b is None:
        return None, 0
    dirs = [0] * new.r1
    for oc, images in edge_map.items():
        for nc, par in images:
            dirs[nc] = old_b.directions[oc] * par
    legal = []
    for assign in product((1, -1), repeat=len(new_edges)):
        for e, d in zip(new_edges, assign):
            dirs[e] = d
        b = Branching(tuple(dirs))
        if not branching_diagnostics(new, b):
            legal.append(b)
    if not legal:
        raise NotApplicable("no branched transit exists for this move")
    if not (0 <= choice < len(legal)):
        raise NotApplicable(f"branching choice {choice} out of range ({len(legal)} legal)")
    return legal[choice], len(legal)


def _finish(kind, site, tri, plan, H_rule, b, choice, H_old=()) -> MoveResult:
    new, new_index = _rebuild(tri, plan)
    edge_map, new_edges, vertex_map, new_vertices = _correspondence(tri, new, plan, new_index)
    H_new = tuple(sorted(H_rule(edge_map, new, new_index)))
    b_new, n_legal = _transit_branching(b, new, edge_map, new_edges, choice)
    return MoveResult(kind, site, tri, new, H_new, b_new, tuple(sorted(plan.removed)),
                      tuple(new_index), edge_map, new_edges, vertex_map, new_vertices, n_legal,
                      tuple(sorted(H_old)))


def _plain_H(H):
    def rule(edge_map, new, new_index):
        return [edge_map[e][0][0] for e in H]
    return rule


# ---------------------------------------------------------------- 2 -> 3


def move_2_3(tri: SingularTriangulation, H, b: Branching | None, face: int,
             choice: int = 0) -> MoveResult:
    """Replace the two tetrahedra on either side of a face class by three around a new edge."""
    if not (0 <= face < tri.r2):
        raise NotApplicable(f"no face class {face}")
    slots = tri.face_classes[face]
    if len(slots) != 2:
        raise NotApplicable("face is on the boundary")
    (t1, f1), (t2, f2) = slots
    if t1 == t2:
        raise NotApplicable("face class is shared by a single tetrahedron")
    pi = tri.gluings[t1][f1][1]
    a = [v for v in range(4) if v != f1]
    plan = _Plan(removed=[t1, t2], n_new=3, internal={})
    for k in range(3):
        ak, ak1, ak2 = a[k], a[(k + 1) % 3], a[(k + 2) % 3]
        # N_k = (top, bottom, a_{k+1}, a_{k+2})
        phi1 = (f1, ak, ak1, ak2)  # face 1 (opposite bottom) <- face a_k of t1
        phi0 = (pi[ak], f2, pi[ak1], pi[ak2])  # face 0 (opposite top) <- face pi(a_k) of t2
        plan.replace[(k, 1)] = (t1, ak, phi1)
        plan.replace[(k, 0)] = (t2, pi[ak], phi0)
        plan.internal[(k, 2)] = ((k + 1) % 3, (0, 1, 3, 2))
        plan.orientation[k] = tri.orientation[t1] * perm_sign(phi1)
    return _finish("2-3", (face,), tri, plan, _plain_H(H), b, choice, H)


# ---------------------------------------------------------------- 1 -> 4


def move_1_4(tri: SingularTriangulation, H, b: Branching | None, tet: int,
             h_edge: tuple[int, int], choice: int = 0) -> MoveResult:
    """Cone a tetrahedron from a new interior vertex; ``h_edge`` is a local edge in H."""
    if not (0 <= tet < tri.n_tets):
        raise NotApplicable(f"no tetrahedron {tet}")
    i, j = sorted(h_edge)
    if (i, j) not in EDGES:
        raise NotApplicable(f"bad local edge {h_edge!r}")
    e_cls, _ = tri.edge_class_of(tet, i, j)
    if e_cls not in set(H):
        raise NotApplicable("the chosen edge is not in H")
    plan = _Plan(removed=[tet], n_new=4, internal={})
    for k in range(4):
        plan.replace[(k, k)] = (tet, k, IDENTITY)
        for l in range(4):
            if l != k:
                plan.internal[(k, l)] = (l, _transposition(k, l))
        plan.orientation[k] = tri.orientation[tet]

    def rule(edge_map, new, new_index):
        out = [edge_map[e][0][0] for e in H if e != e_cls]
        # N_k has the new vertex at local k; edge i-v lives in N_j as local (i, j)
        out.append(new.edge_class_of(new_index[j], i, j)[0])
        out.append(new.edge_class_of(new_index[i], i, j)[0])
        return out

    return _finish("1-4", (tet, i, j), tri, plan, rule, b, choice, H)


# ---------------------------------------------------------------- 0 -> 2


def walk_around_edge(tri: SingularTriangulation, tet: int, i: int, j: int, face: int, steps: int):
    """Cross ``steps`` faces around edge i-j, starting through ``face`` of ``tet``.

    Returns the list of visited states ``(tet, i, j, exit face)``; state 0 is the start.
    """
    if face in (i, j) or i == j:
        raise NotApplicable("start face must contain the pivot edge")
    states = [(tet, i, j, face)]
    t, a, b_, f = tet, i, j, face
    for _ in range(steps):
        u, perm = tri.gluings[t][f]
        a, b_, g = perm[a], perm[b_], perm[f]
        exit_ = ({0, 1, 2, 3} - {a, b_, g}).pop()
        t, f = u, exit_
        states.append((t, a, b_, f))
    return states


def move_0_2(tri: SingularTriangulation, H, b: Branching | None, site: tuple[int, int, int, int, int],
             choice: int = 0) -> MoveResult:
    """Lune move: open two faces around an edge and insert a two-tetrahedron pillow.

    ``site = (tet, i, j, face, steps)``: pivot edge i-j of ``tet``; F1 is the
    face slot ``(tet, face)`` and F2 is the face reached after crossing
    ``steps`` faces around the pivot. The pillow tetrahedra A and B have local
    labels (P0, P1, x1, x2): pivot ends, apex of F1, apex of F2. They are glued
    to each other by the identity on faces 0 and 1; A meets the walked side
    of F1 and F2, B the other side. If the pivot is in H, its copy on B's side
    replaces it in H.
    """
    tet, i, j, face, steps = site
    if steps < 1:
        raise NotApplicable("steps must be >= 1")
    states = walk_around_edge(tri, tet, i, j, face, steps)
    t0, a0, b0, f0 = states[0]
    u1, pi1 = tri.gluings[t0][f0]
    tk, ak, bk, ek = states[-1]
    w, sigma = tri.gluings[tk][ek]
    F1 = {(t0, f0), (u1, pi1[f0])}
    F2 = {(tk, ek), (w, sigma[ek])}
    if F1 == F2:
        raise NotApplicable("F1 and F2 coincide")
    pivot_cls, _ = tri.edge_class_of(tet, i, j)
    m1 = ({0, 1, 2, 3} - {a0, b0, f0}).pop()
    apex_k = ({0, 1, 2, 3} - {ak, bk, ek}).pop()
    permB3 = (a0, b0, m1, f0)
    permA3 = perm_compose(pi1, permB3)
    permA2 = (ak, bk, ek, apex_k)
    permB2 = perm_compose(sigma, permA2)
    plan = _Plan(removed=[], n_new=2, internal={(0, 0): (1, IDENTITY), (0, 1): (1, IDENTITY)})
    plan.attach = {(0, 3): (u1, permA3), (0, 2): (tk, permA2),
                   (1, 3): (t0, permB3), (1, 2): (w, permB2)}
    sA = -tri.orientation[u1] * perm_sign(permA3)
    plan.orientation = {0: sA, 1: -sA}

    def rule(edge_map, new, new_index):
        out = [edge_map[e][0][0] for e in H if e != pivot_cls]
        if pivot_cls in set(H):
            out.append(new.edge_class_of(new_index[1], 0, 1)[0])
        return out

    return _finish("0-2", tuple(site), tri, plan, rule, b, choice, H)


def lune_sites(tri: SingularTriangulation, max_steps: int | None = None):
    """0->2 sites ``(tet, i, j, face, steps)``, walking from each edge's representative."""
    out = []
    for ec in tri.edge_classes:
        t, k, _ = ec.members[0]
        i, j = EDGES[k]
        face = min({0, 1, 2, 3} - {i, j})
        top = ec.degree - 1 if max_steps is None else min(ec.degree - 1, max_steps)
        out.extend((t, i, j, face, s) for s in range(1, top + 1))
    return out


def apply_move(tri, H, b, kind: str, site, choice: int = 0) -> MoveResult:
    if kind == "2-3":
        (face,) = site if isinstance(site, (tuple, list)) else (site,)
        return move_2_3(tri, H, b, int(face), choice)
    if kind == "1-4":
        t, i, j = site
        return move_1_4(tri, H, b, int(t), (int(i), int(j)), choice)
    if kind == "0-2":
        return move_0_2(tri, H, b, tuple(int(v) for v in site), choice)
    raise NotApplicable(f"unknown move {kind!r}")


def candidate_sites(tri: SingularTriangulation, H, kind: str):
    """Sites at which the move is combinatorially defined (transit may still fail)."""
    if kind == "2-3":
        return [(f,) for f, slots in enumerate(tri.face_classes)
                if len(slots) == 2 and slots[0][0] != slots[1][0]]
    if kind == "1-4":
        Hs = set(H)
        out = []
        for t in range(tri.n_tets):
            for i, j in EDGES:
                if tri.edge_class_of(t, i, j)[0] in Hs:
                    out.append((t, i, j))
        return out
    if kind == "0-2":
        return lune_sites(tri)
    raise NotApplicable(f"unknown move {kind!r}")
