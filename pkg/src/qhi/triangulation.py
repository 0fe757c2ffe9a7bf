"""Singular triangulations, their cell quotients, branchings and Hamiltonian edge sets.

A tetrahedron has local vertices 0..3; face ``f`` is the face opposite vertex
``f`` and the six local edges are listed in ``EDGES``. A gluing
``gluings[t][f] = (u, perm)`` identifies face ``f`` of ``t`` with face
``perm[f]`` of ``u``, sending local vertex ``i`` of ``t`` to ``perm[i]`` of ``u``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import BoundExceeded, NotFound

EDGES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {e: k for k, e in enumerate(EDGES)}
FACE_EDGES = {f: tuple(k for k, e in enumerate(EDGES) if f not in e) for f in range(4)}

Perm = tuple[int, int, int, int]
Gluing = Optional[tuple[int, Perm]]


def perm_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def perm_inverse(perm: Sequence[int]) -> Perm:
    out = [0] * len(perm)
    for i, v in enumerate(perm):
        out[v] = i
    return tuple(out)


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    """``(a o b)[i] = a[b[i]]``."""
    return tuple(a[b[i]] for i in range(len(b)))


def edge_key(i: int, j: int) -> tuple[int, int, int]:
    """(local edge index, +1 if i < j else -1)."""
    return (EDGE_INDEX[(i, j)], 1) if i < j else (EDGE_INDEX[(j, i)], -1)


class ParityUnionFind:
    """Union-find over hashable items carrying a Z/2 parity relative to the root."""

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.parity = {x: 1 for x in items}
        self.conflict = set()

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root, acc = x, 1
        for y in reversed(path):
            acc *= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = root
        return root

    def rel(self, x) -> int:
        self.find(x)
        return self.parity[x]

    def union(self, x, y, sign: int = 1):
        """Declare ``x = sign * y``."""
        rx, ry = self.find(x), self.find(y)
        px, py = self.parity[x], self.parity[y]
        if rx == ry:
            if px * py != sign:
                self.conflict.add(rx)
            return
        if ry < rx:
            rx, ry, px, py = ry, rx, py, px
        # attach ry under rx, with y's parity relative to rx fixed by x = sign*y
        self.parent[ry] = rx
        self.parity[ry] = px * py * sign
        if ry in self.conflict:
            self.conflict.discard(ry)
            self.conflict.add(rx)


@dataclass(frozen=True)
class EdgeClass:
    index: int
    representative: tuple[int, int]  # (tet, local edge index)
    members: tuple[tuple[int, int, int], ...]  # (tet, local edge, parity vs representative)
    endpoints: tuple[int, int]  # vertex classes of the representative's (low, high) ends

    @property
    def degree(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SingularTriangulation:
    gluings: tuple[tuple[Gluing, ...], ...]
    orientation: tuple[int, ...]

    def __post_init__(self):
        g = tuple(tuple(None if s is None else (int(s[0]), tuple(int(v) for v in s[1]))
                        for s in row) for row in self.gluings)
        object.__setattr__(self, "gluings", g)
        object.__setattr__(self, "orientation", tuple(int(s) for s in self.orientation))

    # basic counts

    @property
    def n_tets(self) -> int:
        return len(self.gluings)

    @property
    def r3(self) -> int:
        return self.n_tets

    @property
    def r2(self) -> int:
        return len(self.face_classes)

    @property
    def r1(self) -> int:
        return len(self.edge_classes)

    @property
    def r0(self) -> int:
        return len(self.vertex_classes)

    @property
    def is_closed(self) -> bool:
        return all(s is not None for row in self.gluings for s in row)

    def counts(self) -> tuple[int, int, int, int]:
        return self.r0, self.r1, self.r2, self.r3

    def euler_characteristic(self) -> int:
        return self.r0 - self.r1 + self.r2 - self.r3

    # quotients

    @cached_property
    def _vertex_uf(self) -> ParityUnionFind:
        uf = ParityUnionFind([(t, v) for t in range(self.n_tets) for v in range(4)])
        for t, row in enumerate(self.gluings):
            for f, s in enumerate(row):
                if s is None:
                    continue
                u, perm = s
                for v in range(4):
                    if v != f:
                        uf.union((t, v), (u, perm[v]))
        return uf

    @cached_property
    def vertex_classes(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        uf = self._vertex_uf
        groups: dict = {}
        for x in sorted(uf.parent):
            groups.setdefault(uf.find(x), []).append(x)
        return tuple(tuple(g) for _, g in sorted(groups.items()))

    @cached_property
    def vertex_of(self) -> dict[tuple[int, int], int]:
        return {x: k for k, g in enumerate(self.vertex_classes) for x in g}

    @cached_property
    def _edge_uf(self) -> ParityUnionFind:
        uf = ParityUnionFind([(t, k) for t in range(self.n_tets) for k in range(6)])
        for t, row in enumerate(self.gluings):
            for f, s in enumerate(row):
                if s is None:
                    continue
                u, perm = s
                for k in FACE_EDGES[f]:
                    i, j = EDGES[k]
                    k2, sgn = edge_key(perm[i], perm[j])
                    uf.union((t, k), (u, k2), sgn)
        return uf

    @cached_property
    def edge_classes(self) -> tuple[EdgeClass, ...]:
        uf = self._edge_uf
        groups: dict = {}
        for x in sorted(uf.parent):
            groups.setdefault(uf.find(x), []).append(x)
        out = []
        for idx, (root, members) in enumerate(sorted(groups.items())):
            t, k = root
            i, j = EDGES[k]
            ends = (self.vertex_of[(t, i)], self.vertex_of[(t, j)])
            out.append(EdgeClass(idx, root, tuple((m[0], m[1], uf.rel(m)) for m in members), ends))
        return tuple(out)

    @cached_property
    def edge_of(self) -> dict[tuple[int, int], tuple[int, int]]:
        """(tet, local edge) -> (edge class, parity vs the class representative)."""
        return {(t, k): (ec.index, s) for ec in self.edge_classes for t, k, s in ec.members}

    def edge_class_of(self, t: int, i: int, j: int) -> tuple[int, int]:
        """Class of local edge i-j of t, and +1 iff i -> j matches the representative."""
        k, s = edge_key(i, j)
        cls, par = self.edge_of[(t, k)]
        return cls, par * s

    @cached_property
    def reversed_edges(self) -> tuple[int, ...]:
        """Edge classes identified with themselves in reverse (not a manifold)."""
        uf = self._edge_uf
        roots = {uf.find(r) for r in uf.conflict}
        return tuple(ec.index for ec in self.edge_classes if ec.representative in roots)

    @cached_property
    def face_classes(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        seen, out = set(), []
        for t, row in enumerate(self.gluings):
            for f, s in enumerate(row):
                if (t, f) in seen:
                    continue
                group = [(t, f)]
                seen.add((t, f))
                if s is not None:
                    other = (s[0], s[1][f])
                    if other not in seen:
                        group.append(other)
                        seen.add(other)
                out.append(tuple(sorted(group)))
        return tuple(sorted(out))

    @cached_property
    def face_of(self) -> dict[tuple[int, int], int]:
        return {slot: k for k, g in enumerate(self.face_classes) for slot in g}

    def structural_diagnostics(self) -> list["Diagnostic"]:
        out = []
        if len(self.orientation) != self.n_tets:
            out.append(Diagnostic("structure", None, "orientation list length differs from tet count"))
            return out
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                out.append(Diagnostic("structure", (t,), "tetrahedron needs 4 face slots"))
                continue
            if self.orientation[t] not in (1, -1):
                out.append(Diagnostic("structure", (t,), "orientation sign must be +-1"))
            for f, s in enumerate(row):
                if s is None:
                    out.append(Diagnostic("boundary", (t, f), "unglued face slot"))
                    continue
                u, perm = s
                if not (0 <= u < self.n_tets) or sorted(perm) != [0, 1, 2, 3]:
                    out.append(Diagnostic("structure", (t, f), f"bad gluing target {s!r}"))
                    continue
                g = perm[f]
                back = self.gluings[u][g]
                if back is None or back[0] != t or tuple(back[1]) != perm_inverse(perm):
                    out.append(Diagnostic("involution", (t, f), "gluing is not an involution"))
                if (u, g) == (t, f):
                    out.append(Diagnostic("involution", (t, f), "face glued to itself"))
                if self.orientation[t] * self.orientation[u] * perm_sign(perm) != -1:
                    out.append(Diagnostic("orientation", (t, f), "gluing does not reverse orientation"))
        if out:
            return out
        for e in self.reversed_edges:
            out.append(Diagnostic("edge", (e,), "edge class identified with its own reverse"))
        if self.is_closed:
            if self.r2 != 2 * self.r3:
                out.append(Diagnostic("counts", None, "r2 != 2 r3"))
            if self.euler_characteristic() != 0:
                out.append(Diagnostic("counts", None,
                                      f"Euler characteristic {self.euler_characteristic()} != 0"))
        return out


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    location: tuple | None
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "location": None if self.location is None else list(self.location),
                "message": self.message}


@dataclass(frozen=True)
class Branching:
    """Direction per edge class: +1 means from the representative's low to high end."""

    directions: tuple[int, ...]

    def local(self, tri: SingularTriangulation, t: int, i: int, j: int) -> int:
        """+1 iff local edge i-j of t is oriented i -> j."""
        cls, par = tri.edge_class_of(t, i, j)
        return self.directions[cls] * par

    def flipped(self, edge: int) -> "Branching":
        d = list(self.directions)
        d[edge] = -d[edge]
        return Branching(tuple(d))


def tet_order(tri: SingularTriangulation, b: Branching, t: int) -> tuple[int, ...] | None:
    """Local vertices sorted from source to sink, or None if not a total order."""
    indeg = [0] * 4
    for i, j in EDGES:
        if b.local(tri, t, i, j) > 0:
            indeg[j] += 1
        else:
            indeg[i] += 1
    if sorted(indeg) != [0, 1, 2, 3]:
        return None
    return tuple(sorted(range(4), key=lambda v: indeg[v]))


def tet_index(tri: SingularTriangulation, b: Branching, t: int) -> int:
    """-1 when the branching order induces the tetrahedron's orientation, else +1."""
    order = tet_order(tri, b, t)
    if order is None:
        raise ValueError(f"tetrahedron {t} is not branched")
    return -perm_sign(order) * tri.orientation[t]


def branching_diagnostics(tri: SingularTriangulation, b: Branching) -> list[Diagnostic]:
    if len(b.directions) != tri.r1 or any(d not in (1, -1) for d in b.directions):
        return [Diagnostic("branching", None, "need one direction +-1 per edge class")]
    return [Diagnostic("branching", (t,), "not exactly one source and one sink")
            for t in range(tri.n_tets) if tet_order(tri, b, t) is None]


def hamiltonian_germs(tri: SingularTriangulation, H) -> list[int]:
    germs = [0] * tri.r0
    for e in H:
        a, b = tri.edge_classes[e].endpoints
        germs[a] += 1
        germs[b] += 1
    return germs


def hamiltonian_diagnostics(tri: SingularTriangulation, H) -> list[Diagnostic]:
    H = list(H)
    bad = [e for e in H if not (0 <= e < tri.r1)]
    if bad:
        return [Diagnostic("hamiltonian", tuple(bad), "unknown edge class")]
    if len(set(H)) != len(H):
        return [Diagnostic("hamiltonian", None, "repeated edge in H")]
    return [Diagnostic("hamiltonian", (v,), f"{g} germs of H at vertex (need 2)")
            for v, g in enumerate(hamiltonian_germs(tri, H)) if g != 2]


def validate(tri: SingularTriangulation, H=None, b: Branching | None = None) -> list[Diagnostic]:
    out = tri.structural_diagnostics()
    if out:
        return out
    if H is not None:
        out += hamiltonian_diagnostics(tri, H)
    if b is not None:
        out += branching_diagnostics(tri, b)
    return out


def find_branching(tri: SingularTriangulation, bound: int = 24) -> Branching:
    """Depth-first search over edge directions, pruning coherently oriented faces.

    The first branching in lexicographic order (+1 before -1) is returned.
    """
    r1 = tri.r1
    if r1 > bound:
        raise BoundExceeded(f"{r1} edge classes exceed the search bound {bound}")
    # each abstract face: three (class, parity) pairs around its boundary cycle
    cycles = []
    for t in range(tri.n_tets):
        for f in range(4):
            a, b_, c = [v for v in range(4) if v != f]
            cycles.append(tuple(tri.edge_class_of(t, x, y) for x, y in ((a, b_), (b_, c), (c, a))))
    by_last: dict[int, list] = {}
    for cyc in cycles:
        by_last.setdefault(max(cls for cls, _ in cyc), []).append(cyc)
    dirs = [0] * r1

    def coherent(cyc):
        vals = [dirs[cls] * par for cls, par in cyc]
        return vals[0] == vals[1] == vals[2]

    def search(k):
        if k == r1:
            return True
        for d in (1, -1):
            dirs[k] = d
            if not any(coherent(c) for c in by_last.get(k, ())) and search(k + 1):
                return True
        dirs[k] = 0
        return False

    if not search(0):
        raise NotFound("no branching on this triangulation")
    return Branching(tuple(dirs))


def all_branchings(tri: SingularTriangulation, limit: int = 64) -> list[Branching]:
    """Up to ``limit`` branchings, by brute force over small edge sets."""
    if tri.r1 > 16:
        raise BoundExceeded("too many edges for enumeration")
    out = []
    for mask in range(2 ** tri.r1):
        b = Branching(tuple(-1 if (mask >> k) & 1 else 1 for k in range(tri.r1)))
        if not branching_diagnostics(tri, b):
            out.append(b)
            if len(out) >= limit:
                break
    return out


def mirror(tri: SingularTriangulation) -> SingularTriangulation:
    """Same gluings with every orientation sign reversed."""
    return SingularTriangulation(tri.gluings, tuple(-o for o in tri.orientation))


def is_interior_edge(tri: SingularTriangulation, e: int) -> bool:
    """No face around the edge is left unglued."""
    for t, k, _ in tri.edge_classes[e].members:
        i, j = EDGES[k]
        if any(tri.gluings[t][f] is None for f in range(4) if f not in (i, j)):
            return False
    return True
