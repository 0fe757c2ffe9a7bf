"""Full B-cocycles, integral charges, gauges, and their transit through moves.

A cocycle stores one upper-triangular matrix ``[[t, x], [0, 1/t]]`` per edge
class, along the class representative's low -> high direction; the reversed
edge carries the inverse ``(1/t, -x)``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import RootContext
from .errors import ExhaustedRetries, Infeasible, NotACocycle, TransitFailure
from .intlinalg import solve_integer
from .moves import MoveResult
from .triangulation import (EDGES, Branching, Diagnostic, SingularTriangulation, is_interior_edge,
                            perm_sign, tet_index, tet_order)

BElement = tuple[complex, complex]  # (t, x) for [[t, x], [0, 1/t]]


def b_mul(a: BElement, b: BElement) -> BElement:
    return (a[0] * b[0], a[0] * b[1] + a[1] / b[0])


def b_inv(a: BElement) -> BElement:
    return (1 / a[0], -a[1])


def b_pow(a: BElement, n: int) -> BElement:
    out, base = (1 + 0j, 0j), a if n >= 0 else b_inv(a)
    for _ in range(abs(int(n))):
        out = b_mul(out, base)
    return out


def b_matrix(a: BElement) -> np.ndarray:
    return np.array([[a[0], a[1]], [0, 1 / a[0]]], dtype=complex)


@dataclass(frozen=True)
class BCocycle:
    values: tuple[BElement, ...]
    gauge_log: tuple = ()  # ((vertex, (t, x)), ...) applied since construction

    def __post_init__(self):
        object.__setattr__(self, "values",
                           tuple((complex(t), complex(x)) for t, x in self.values))

    def along(self, tri: SingularTriangulation, t: int, i: int, j: int) -> BElement:
        """Value on local edge i -> j of tetrahedron t."""
        cls, par = tri.edge_class_of(t, i, j)
        v = self.values[cls]
        return v if par > 0 else b_inv(v)

    def oriented(self, b: Branching, edge: int) -> BElement:
        """Value along the branching direction of an edge class."""
        v = self.values[edge]
        return v if b.directions[edge] > 0 else b_inv(v)

    def conjugate(self) -> "BCocycle":
        return BCocycle(tuple((t.conjugate(), x.conjugate()) for t, x in self.values))

    def scaled(self, lam: complex) -> "BCocycle":
        """Conjugation by diag(sqrt(lam), 1/sqrt(lam)): every x picks up the factor lam."""
        return BCocycle(tuple((t, lam * x) for t, x in self.values))


def _close(a: complex, b: complex, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def cocycle_residual(tri: SingularTriangulation, z: BCocycle) -> float:
    worst = 0.0
    for t in range(tri.n_tets):
        for f in range(4):
            a, b_, c = [v for v in range(4) if v != f]
            lhs = b_mul(z.along(tri, t, a, b_), z.along(tri, t, b_, c))
            rhs = z.along(tri, t, a, c)
            scale = max(1.0, abs(rhs[0]), abs(rhs[1]))
            worst = max(worst, abs(lhs[0] - rhs[0]) / scale, abs(lhs[1] - rhs[1]) / scale)
    return worst


def validate_cocycle(tri: SingularTriangulation, b: Branching | None, z: BCocycle,
                     tol: float = 1e-9) -> list[Diagnostic]:
    """Cocycle condition on every abstract face, and fullness on every edge.

    The condition does not depend on the vertex order used on a face; the
    branching order is used when given, to match the stated form.
    """
    out = []
    if len(z.values) != tri.r1:
        return [Diagnostic("cocycle", None, "need one value per edge class")]
    for e, (t, x) in enumerate(z.values):
        if t == 0:
            out.append(Diagnostic("cocycle", (e,), "t vanishes"))
        if abs(x) <= tol * max(1.0, abs(t)):
            out.append(Diagnostic("fullness", (e,), "x vanishes: cocycle not full"))
    if any(d.kind == "cocycle" for d in out):
        return out
    for t in range(tri.n_tets):
        order = tet_order(tri, b, t) if b is not None else None
        for f in range(4):
            vs = [v for v in (order or range(4)) if v != f]
            v0, v1, v2 = vs
            lhs = b_mul(z.along(tri, t, v0, v1), z.along(tri, t, v1, v2))
            rhs = z.along(tri, t, v0, v2)
            if not (_close(lhs[0], rhs[0], tol) and _close(lhs[1], rhs[1], tol)):
                out.append(Diagnostic("cocycle", (t, f), "z(e02) != z(e01) z(e12)"))
    return out


def is_full(z: BCocycle, tol: float = 1e-9) -> bool:
    return all(abs(x) > tol * max(1.0, abs(t)) for t, x in z.values)


def gauge_transform(tri: SingularTriangulation, z: BCocycle, gauges) -> BCocycle:
    """``z'(e) = lambda(v0)^-1 z(e) lambda(v1)`` for ``gauges = {vertex: (t, x)}``.

    A single ``(vertex, lambda)`` pair is accepted as well.
    """
    if isinstance(gauges, tuple) and len(gauges) == 2 and isinstance(gauges[0], (int, np.integer)):
        gauges = {int(gauges[0]): gauges[1]}
    one = (1.0 + 0j, 0j)
    out = []
    for ec in tri.edge_classes:
        v0, v1 = ec.endpoints
        l0, l1 = gauges.get(v0, one), gauges.get(v1, one)
        out.append(b_mul(b_mul(b_inv(l0), z.values[ec.index]), l1))
    log = z.gauge_log + tuple(sorted((int(v), tuple(map(complex, g))) for v, g in gauges.items()))
    return BCocycle(tuple(out), log)


def restore_fullness(tri: SingularTriangulation, z: BCocycle, rng: np.random.Generator,
                     eps: float = 0.5, max_tries: int = 50, tol: float = 1e-9,
                     extra=None) -> BCocycle:
    """Random small coboundaries at vertices touching non-full edges.

    ``extra`` is an optional predicate on the candidate cocycle (for instance
    state-sum regularity) that must also hold. The gauge log records every
    applied coboundary, so the cohomology class can be audited.
    """
    ok = lambda w: is_full(w, tol) and (extra is None or extra(w))
    if ok(z):
        return z
    for _ in range(max_tries):
        bad = [e for e, (t, x) in enumerate(z.values) if abs(x) <= tol * max(1.0, abs(t))]
        verts = sorted({v for e in bad for v in tri.edge_classes[e].endpoints}) or list(range(tri.r0))
        gauges = {}
        for v in verts:
            g = rng.normal(size=4)
            gauges[v] = (1 + eps * (g[0] + 1j * g[1]) / 4, eps * (g[2] + 1j * g[3]))
        cand = gauge_transform(tri, z, gauges)
        if ok(cand):
            return cand
    raise ExhaustedRetries("could not reach a full cocycle by vertex coboundaries")


def random_gauge(rng: np.random.Generator, eps: float = 0.5) -> BElement:
    g = rng.normal(size=4)
    return (1 + eps * (g[0] + 1j * g[1]) / 4, eps * (g[2] + 1j * g[3]))


def cocycle_from_abelian(tri: SingularTriangulation, kind: str, class_data: Sequence,
                         lam: complex = 1.0, modulus: int | None = None,
                         tol: float = 1e-12, generator: BElement | None = None
                         ) -> tuple[BCocycle, list[str]]:
    """Diagonal (multiplicative), parabolic (additive) or ``power`` cocycle from a class ``u``.

    ``power`` needs an integral class and a ``generator`` g in B, and sets
    ``z(e) = g^u(e)``; it is full when no ``u(e)`` vanishes and g is generic.

    ``class_data[e]`` is u on edge class e, along its representative. The
    additive condition ``u(ab) + u(bc) = u(ac)`` is checked on all faces,
    modulo ``modulus`` when given (torsion classes). Returns the cocycle and
    a list of warnings (non-fullness).
    """
    u = list(class_data)
    if len(u) != tri.r1:
        raise NotACocycle("need one value per edge class")
    for t in range(tri.n_tets):
        for f in range(4):
            a, b_, c = [v for v in range(4) if v != f]
            val = 0
            for (x, y), s in (((a, b_), 1), ((b_, c), 1), ((a, c), -1)):
                cls, par = tri.edge_class_of(t, x, y)
                val += s * par * u[cls]
            if modulus is not None:
                bad = round(val.real) % modulus != 0 if isinstance(val, (int, np.integer)) \
                    else abs(cmath.exp(2j * cmath.pi * val / modulus) - 1) > 1e-9
            else:
                bad = abs(val) > tol
            if bad:
                raise NotACocycle(f"class data fails on face {f} of tetrahedron {t}")
    warnings = []
    if kind == "multiplicative":
        vals = tuple((cmath.exp(lam * v), 0j) for v in u)
        warnings.append("multiplicative cocycle is diagonal, hence not full")
    elif kind == "power":
        if generator is None:
            raise ValueError("power cocycles need a generator")
        vals = tuple(b_pow(generator, int(v)) for v in u)
        if not is_full(BCocycle(vals)):
            warnings.append("power cocycle has a vanishing edge: not full")
    elif kind == "additive":
        vals = tuple((1 + 0j, complex(v)) for v in u)
        if any(abs(complex(v)) <= tol for v in u):
            warnings.append("additive cocycle has a vanishing edge: not full")
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return BCocycle(vals), warnings


# ---------------------------------------------------------------- charges

PAIR = (0, 1, 2, 2, 1, 0)  # local edge index -> opposite pair (01|23, 02|13, 03|12)


@dataclass(frozen=True)
class IntegralCharge:
    """Per tetrahedron the charges ``(c01, c02, c03)`` of the three opposite-edge pairs."""

    values: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(int(v) for v in c) for c in self.values))

    def edge(self, t: int, i: int, j: int) -> int:
        k = EDGES.index((min(i, j), max(i, j)))
        return self.values[t][PAIR[k]]

    def __add__(self, other: "IntegralCharge") -> "IntegralCharge":
        return IntegralCharge(tuple(tuple(a + b for a, b in zip(x, y))
                                    for x, y in zip(self.values, other.values)))

    def __sub__(self, other: "IntegralCharge") -> "IntegralCharge":
        return IntegralCharge(tuple(tuple(a - b for a, b in zip(x, y))
                                    for x, y in zip(self.values, other.values)))


def edge_sums(tri: SingularTriangulation, c: IntegralCharge) -> list[int]:
    out = [0] * tri.r1
    for ec in tri.edge_classes:
        out[ec.index] = sum(c.values[t][PAIR[k]] for t, k, _ in ec.members)
    return out


def charge_targets(tri: SingularTriangulation, H) -> list[int | None]:
    """2 per edge class, 0 on H; None on boundary edges, which carry no condition."""
    Hs = set(H)
    closed = tri.is_closed
    return [None if not (closed or is_interior_edge(tri, e)) else 0 if e in Hs else 2
            for e in range(tri.r1)]


def validate_charge(tri: SingularTriangulation, H, c: IntegralCharge) -> list[Diagnostic]:
    out = []
    if len(c.values) != tri.n_tets:
        return [Diagnostic("charge", None, "need one triple per tetrahedron")]
    for t, v in enumerate(c.values):
        if sum(v) != 1:
            out.append(Diagnostic("charge", (t,), f"face condition fails: {v} sums to {sum(v)}"))
    for e, (s, target) in enumerate(zip(edge_sums(tri, c), charge_targets(tri, H))):
        if target is not None and s != target:
            out.append(Diagnostic("charge", (e,), f"edge sum {s}, expected {target}"))
    return out


def _charge_system(tri, H, fixed: dict[int, tuple[int, int, int]]):
    free = [t for t in range(tri.n_tets) if t not in fixed]
    col = {t: n for n, t in enumerate(free)}
    A, rhs, rows = [], [], []
    for ec, target in zip(tri.edge_classes, charge_targets(tri, H)):
        if target is None:
            continue
        rows.append(ec.index)
        row = [0] * (2 * len(free))
        const = 0
        for t, k, _ in ec.members:
            pair = PAIR[k]
            if t in fixed:
                const += fixed[t][pair]
            elif pair == 2:  # c03 = 1 - c01 - c02
                const += 1
                row[2 * col[t]] -= 1
                row[2 * col[t] + 1] -= 1
            else:
                row[2 * col[t] + pair] += 1
        A.append(row)
        rhs.append(target - const)
    return free, A, rhs, rows


def solve_charges(tri: SingularTriangulation, H, fixed: dict | None = None) -> IntegralCharge:
    """Integral charge with face sums 1 and edge sums 2 (0 on H), by exact HNF.

    Unknowns are ``(c01, c02)`` per tetrahedron, with ``c03 = 1 - c01 - c02``;
    tetrahedra listed in ``fixed`` keep their given triples.
    """
    fixed = dict(fixed or {})
    free, A, rhs, rows = _charge_system(tri, H, fixed)
    try:
        x, _ = solve_integer(A, rhs, 2 * len(free))
    except Infeasible as exc:
        edge = rows[exc.certificate["row"]]
        raise Infeasible(f"no integral charge: edge {edge} cannot be balanced",
                         certificate={"edge": edge, **exc.certificate}) from None
    vals = dict(fixed)
    for n, t in enumerate(free):
        a, b_ = x[2 * n], x[2 * n + 1]
        vals[t] = (a, b_, 1 - a - b_)
    return IntegralCharge(tuple(vals[t] for t in range(tri.n_tets)))


def charge_kernel(tri: SingularTriangulation, H) -> list[IntegralCharge]:
    """Integer basis of charge differences (face sums 0, edge sums 0)."""
    free, A, rhs, _ = _charge_system(tri, H, {})
    _, kernel = solve_integer(A, [0] * len(A), 2 * len(free))
    # homogeneous parametrization: c03 = -c01 - c02
    return [IntegralCharge(tuple((v[2 * t], v[2 * t + 1], -v[2 * t] - v[2 * t + 1])
                                 for t in range(tri.n_tets))) for v in kernel]


@dataclass(frozen=True)
class ChargeLatticeVector:
    """Per tetrahedron the pair ``(dw1, dw2)`` in branched coordinates.

    The branched coordinates are ``w1 = c(v0 v1)`` and ``w2 = c(v1 v2)``, with
    ``c(v0 v2) = 1 - w1 - w2``, where v0..v3 is the branching order.
    """

    edge: int
    components: tuple[tuple[int, int], ...]

    def flat(self) -> tuple[int, ...]:
        """All first components, then all second ones."""
        return tuple(w for w, _ in self.components) + tuple(w for _, w in self.components)


def _pair_of(i: int, j: int) -> int:
    return PAIR[EDGES.index((min(i, j), max(i, j)))]


def charge_lattice_vector(tri: SingularTriangulation, b: Branching, edge: int) -> ChargeLatticeVector:
    """Neumann's vector: per tetrahedron ``eps (r2, -r1)``, where ``r1 w1 + r2 w2`` is the
    tetrahedron's contribution to the charge sum around ``edge`` and ``eps = -index``
    compares the branching order with the orientation."""
    comps = []
    for t in range(tri.n_tets):
        v = tet_order(tri, b, t)
        p01, p12, p02 = _pair_of(v[0], v[1]), _pair_of(v[1], v[2]), _pair_of(v[0], v[2])
        r1 = r2 = 0
        for tt, k, _ in tri.edge_classes[edge].members:
            if tt != t:
                continue
            pair = PAIR[k]
            if pair == p01:
                r1 += 1
            elif pair == p12:
                r2 += 1
            else:
                r1 -= 1
                r2 -= 1
        eps = -tet_index(tri, b, t)
        comps.append((eps * r2, -eps * r1))
    return ChargeLatticeVector(edge, tuple(comps))


def lattice_delta(tri: SingularTriangulation, b: Branching, w: ChargeLatticeVector) -> IntegralCharge:
    """The charge difference a lattice vector stands for, as ``(c01, c02, c03)`` triples."""
    out = []
    for t, (d1, d2) in enumerate(w.components):
        v = tet_order(tri, b, t)
        trip = [0, 0, 0]
        trip[_pair_of(v[0], v[1])] += d1
        trip[_pair_of(v[1], v[2])] += d2
        trip[_pair_of(v[0], v[2])] -= d1 + d2
        out.append(tuple(trip))
    return IntegralCharge(tuple(out))


def reduce_charge_mod_N(ctx: RootContext, c: IntegralCharge) -> tuple[tuple[int, int, int], ...]:
    """``(p + 1) c' mod N`` per pair; face sums become ``1/2 = p + 1``."""
    return tuple(tuple((ctx.half * v) % ctx.N for v in trip) for trip in c.values)


# ---------------------------------------------------------------- transit


def transit_cocycle(move: MoveResult, z: BCocycle, rng: np.random.Generator | None = None,
                    new_vertex_value: BElement | None = None, tol: float = 1e-9) -> BCocycle:
    """Carry z to the new complex. New edges are forced by the cocycle condition,
    except the edges at a new vertex, where one edge value is free (drawn from
    ``rng`` unless given) and the others follow."""
    old, new = move.old, move.tri
    vals: list[BElement | None] = [None] * new.r1
    for oc, images in move.edge_map.items():
        for nc, par in images:
            v = z.values[oc]
            vals[nc] = v if par > 0 else b_inv(v)

    def propagate():
        changed = True
        while changed:
            changed = False
            for t in range(new.n_tets):
                for f in range(4):
                    a, b_, c = [v for v in range(4) if v != f]
                    es = [new.edge_class_of(t, *p) for p in ((a, b_), (b_, c), (a, c))]
                    known = [vals[e] is not None for e, _ in es]
                    if sum(known) != 2:
                        continue
                    get = lambda k: vals[es[k][0]] if es[k][1] > 0 else b_inv(vals[es[k][0]])
                    if not known[2]:
                        v, k = b_mul(get(0), get(1)), 2
                    elif not known[0]:
                        v, k = b_mul(get(2), b_inv(get(1))), 0
                    else:
                        v, k = b_mul(b_inv(get(0)), get(2)), 1
                    e, par = es[k]
                    vals[e] = v if par > 0 else b_inv(v)
                    changed = True

    propagate()
    if any(v is None for v in vals):
        if new_vertex_value is None:
            rng = rng if rng is not None else np.random.default_rng(0)
            new_vertex_value = random_gauge(rng, 1.0)
        e = next(k for k, v in enumerate(vals) if v is None)
        vals[e] = tuple(map(complex, new_vertex_value))
        propagate()
    out = BCocycle(tuple(vals))
    diag = validate_cocycle(new, move.branching, out, tol=max(tol, 1e-8))
    if any(d.kind == "cocycle" for d in diag):
        raise TransitFailure("transported values violate the cocycle condition", "cocycle")
    if any(d.kind == "fullness" for d in diag):
        raise TransitFailure("transported cocycle is not full", "fullness")
    return out


def transit_charge(move: MoveResult, c: IntegralCharge) -> IntegralCharge:
    """Keep surviving tetrahedra, solve the new ones so every edge sum is 2 (0 on H')."""
    removed = set(move.removed)
    fixed = {t: c.values[t] for t in range(move.old.n_tets) if t not in removed}
    try:
        return solve_charges(move.tri, move.H, fixed)
    except Infeasible as exc:
        raise TransitFailure(f"charge transit infeasible: {exc}", "charge-infeasible") from None


def transit_decoration(move: MoveResult, z: BCocycle, c: IntegralCharge,
                       rng: np.random.Generator | None = None, **kw) -> tuple[BCocycle, IntegralCharge]:
    return transit_cocycle(move, z, rng, **kw), transit_charge(move, c)


# ---------------------------------------------------------------- curve conditions


def _check_step_chain(tri: SingularTriangulation, steps, corner: bool) -> None:
    for k in range(len(steps) - 1):
        t, *rest = steps[k]
        v, fin, fout = rest if corner else (None, *rest)
        s = tri.gluings[t][fout]
        if s is None:
            raise ValueError(f"step {k}: exit face {fout} of tetrahedron {t} is on the boundary")
        u, perm = s
        nt, *nrest = steps[k + 1]
        nv, nfin, _ = nrest if corner else (None, *nrest)
        if nt != u or nfin != perm[fout] or (corner and nv != perm[v]):
            raise ValueError(f"step {k + 1} does not continue step {k} across the gluing")


def curve_alpha(tri: SingularTriangulation, c: IntegralCharge, steps) -> int:
    """Sum of c' over the edges selected by a curve crossing tetrahedra.

    ``steps`` lists ``(tet, enter face, exit face)``; the selected edge joins
    the two vertices that are neither face's opposite vertex. The charge
    condition asks this to be even for every such curve.
    """
    steps = [tuple(int(v) for v in s) for s in steps]
    for t, fin, fout in steps:
        if fin == fout:
            raise ValueError("curve back-tracks")
    _check_step_chain(tri, steps, corner=False)
    total = 0
    for t, fin, fout in steps:
        i, j = sorted({0, 1, 2, 3} - {fin, fout})
        total += c.edge(t, i, j)
    return total


def curve_sigma(tri: SingularTriangulation, c: IntegralCharge, steps) -> int:
    """Signed sum along a curve on the vertex links.

    ``steps`` lists ``(tet, corner v, enter face, exit face)``: the link
    triangle at corner v of tet is entered through its side on face ``enter``
    and left through ``exit``. The selected vertex is edge ``v w`` with
    ``w`` the remaining vertex; its sign is ``orientation * sign(v, enter, exit, w)``.
    """
    steps = [tuple(int(v) for v in s) for s in steps]
    for t, v, fin, fout in steps:
        if len({v, fin, fout}) < 3:
            raise ValueError("steps need distinct corner, enter and exit")
    _check_step_chain(tri, steps, corner=True)
    total = 0
    for t, v, fin, fout in steps:
        (w,) = {0, 1, 2, 3} - {v, fin, fout}
        sign = tri.orientation[t] * perm_sign((v, fin, fout, w))
        total += sign * c.edge(t, v, w)
    return total
