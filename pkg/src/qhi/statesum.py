"""State sums: per-tetrahedron c-6j tensors, face-bond contraction, weights, and K_N.

Closed evaluation first flattens the decorated triangulation into a
``CutOpenInput`` (one record per tetrahedron plus the bond count, the edge
weights and ``r0``) and then runs the same evaluator the cut-open mode uses,
so both paths are floating-point identical on coherent data.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cyclotomic import RootContext, RootDetermination
from .decoration import BCocycle, IntegralCharge, reduce_charge_mod_N, PAIR
from .errors import BudgetExceeded, NotRegularError, PoleError, ValidationError
from .sixj import cR_from_x, cRbar_from_x, fermat_residual
from .triangulation import EDGES, Branching, SingularTriangulation, tet_index, tet_order, validate


@dataclass(frozen=True)
class DecoratedTetrahedron:
    """One tetrahedron of a state sum.

    ``X = (y01, y12, y23, y02, y13, y03)`` in branching order, ``charges``
    the reduced pair ``(c(v0 v1), c(v1 v2))``, and ``bonds[k]`` the bond that
    carries the state ``alpha_k`` of the face opposite ``v_k``.
    """

    index: int
    X: tuple[complex, ...]
    charges: tuple[int, int]
    bonds: tuple[int, int, int, int]
    label: int | None = None

    def tensor(self, ctx: RootContext) -> np.ndarray:
        """Components indexed by ``(alpha_0, alpha_1, alpha_2, alpha_3)``."""
        a, c = self.charges
        try:
            if self.index == -1:
                # R(..|a,c)_{alpha3, alpha1}^{alpha2, alpha0}
                return cR_from_x(ctx, self.X, a, c).transpose(3, 1, 2, 0)
            # Rbar(..|a,c)_{alpha2, alpha0}^{alpha3, alpha1}
            return cRbar_from_x(ctx, self.X, a, c).transpose(1, 3, 0, 2)
        except (PoleError, ZeroDivisionError, ValueError) as exc:
            raise NotRegularError(f"tetrahedron {self.label}: {exc}", where=self.label) from None


@dataclass(frozen=True)
class CutOpenInput:
    tets: tuple[DecoratedTetrahedron, ...]
    n_bonds: int
    weights: tuple[complex, ...]  # y(e) for every edge outside H
    r0: int


@dataclass(frozen=True)
class TensorNetwork:
    tensors: tuple[np.ndarray, ...]
    bonds: tuple[tuple[int, ...], ...]
    n_bonds: int

    def degrees(self) -> list[int]:
        deg = [0] * self.n_bonds
        for bs in self.bonds:
            for b in bs:
                deg[b] += 1
        return deg


@dataclass(frozen=True)
class StateSum:
    K: complex
    pre_power: complex  # N^-r0 * contraction * weights
    contraction: complex
    weight: complex
    network_size: tuple[int, int]

    def to_dict(self) -> dict:
        return {"K": [self.K.real, self.K.imag], "pre_power": [self.pre_power.real, self.pre_power.imag],
                "contraction": [self.contraction.real, self.contraction.imag],
                "nodes": self.network_size[0], "bonds": self.network_size[1]}


# ---------------------------------------------------------------- assembly


def tet_y_values(tri: SingularTriangulation, b: Branching, z: BCocycle, d: RootDetermination,
                 t: int) -> tuple[complex, ...]:
    v = tet_order(tri, b, t)
    y = {}
    for k, l in ((0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)):
        cls, _ = tri.edge_class_of(t, v[k], v[l])
        y[(k, l)] = d.root(z.oriented(b, cls)[1])
    return (y[(0, 1)], y[(1, 2)], y[(2, 3)], y[(0, 2)], y[(1, 3)], y[(0, 3)])


def edge_y(b: Branching, z: BCocycle, d: RootDetermination, e: int) -> complex:
    return d.root(z.oriented(b, e)[1])


def to_cutopen(ctx: RootContext, d: RootDetermination, tri: SingularTriangulation, H,
               b: Branching, z: BCocycle, c: IntegralCharge, *, check: bool = True) -> CutOpenInput:
    """Flatten a closed decorated triangulation into per-tetrahedron records."""
    if check:
        diags = validate(tri, H, b)
        if diags:
            raise ValidationError("invalid triangulation", diags)
        if not tri.is_closed:
            raise ValidationError("closed evaluation needs every face glued")
    red = reduce_charge_mod_N(ctx, c)
    tets = []
    for t in range(tri.n_tets):
        v = tet_order(tri, b, t)
        X = tet_y_values(tri, b, z, d, t)
        pair = lambda i, j: PAIR[EDGES.index((min(i, j), max(i, j)))]
        charges = (red[t][pair(v[0], v[1])], red[t][pair(v[1], v[2])])
        bonds = tuple(tri.face_of[(t, v[k])] for k in range(4))
        tets.append(DecoratedTetrahedron(tet_index(tri, b, t), X, charges, bonds, t))
    Hs = set(H)
    weights = tuple(edge_y(b, z, d, e) for e in range(tri.r1) if e not in Hs)
    return CutOpenInput(tuple(tets), tri.r2, weights, tri.r0)


def assemble_network(ctx: RootContext, inp: CutOpenInput) -> TensorNetwork:
    return TensorNetwork(tuple(t.tensor(ctx) for t in inp.tets),
                         tuple(t.bonds for t in inp.tets), inp.n_bonds)


def assemble(ctx, d, tri, H, b, z, c) -> TensorNetwork:
    return assemble_network(ctx, to_cutopen(ctx, d, tri, H, b, z, c))


def fermat_audit(inp: CutOpenInput, N: int) -> float:
    return max((fermat_residual(N, t.X) for t in inp.tets), default=0.0)


# ---------------------------------------------------------------- contraction


def _trace_self(T: np.ndarray, labels: tuple[int, ...]):
    """Trace out bonds that occur twice on one tensor."""
    labels = list(labels)
    while True:
        dup = next((b for b in labels if labels.count(b) == 2), None)
        if dup is None:
            return T, tuple(labels)
        i = labels.index(dup)
        j = labels.index(dup, i + 1)
        T = np.trace(T, axis1=i, axis2=j)
        labels = [b for k, b in enumerate(labels) if k not in (i, j)]


def _merge(A, la, B, lb):
    shared = [b for b in la if b in lb]
    ia = [la.index(b) for b in shared]
    ib = [lb.index(b) for b in shared]
    out = np.tensordot(A, B, axes=(ia, ib))
    labels = tuple(b for b in la if b not in shared) + tuple(b for b in lb if b not in shared)
    return _trace_self(out, labels)


def greedy_plan(network: TensorNetwork) -> list[tuple[int, int]]:
    """Pairwise merges minimizing the dense size of each intermediate.

    Items are numbered as created: inputs 0..n-1, then each merge appends a
    new item. Ties break on the smallest index pair, so plans are reproducible.
    """
    items = {k: set(_trace_labels(bs)) for k, bs in enumerate(network.bonds)}
    nxt = len(items)
    plan = []
    while len(items) > 1:
        keys = sorted(items)
        best = None
        for x in range(len(keys)):
            for y in range(x + 1, len(keys)):
                a, b = keys[x], keys[y]
                la, lb = items[a], items[b]
                connected = bool(la & lb)
                size = len(la ^ lb)
                key = (not connected, size, a, b)
                if best is None or key < best[0]:
                    best = (key, a, b)
        _, a, b = best
        items[nxt] = items.pop(a) ^ items.pop(b)
        plan.append((a, b))
        nxt += 1
    return plan


def _trace_labels(bs):
    return [b for b in bs if list(bs).count(b) == 1]


def linear_plan(order: Sequence[int]) -> list[tuple[int, int]]:
    """Merge tensors one by one in the given order."""
    order = list(order)
    if not order:
        return []
    plan, acc, nxt = [], order[0], len(order)
    for k in order[1:]:
        plan.append((acc, k))
        acc = nxt
        nxt += 1
    return plan


def contract_open(network: TensorNetwork, plan: list[tuple[int, int]] | None = None
                  ) -> tuple[np.ndarray, tuple[int, ...]]:
    """Contract every degree-2 bond; degree-1 bonds stay open, in increasing label order."""
    deg = network.degrees()
    bad = [b for b, k in enumerate(deg) if k > 2]
    if bad:
        raise ValidationError(f"bonds {bad[:5]} occur more than twice")
    if not network.tensors:
        return np.ones(()), ()
    plan = greedy_plan(network) if plan is None else plan
    items = {k: _trace_self(T, bs) for k, (T, bs) in enumerate(zip(network.tensors, network.bonds))}
    nxt = len(items)
    for a, b in plan:
        (A, la), (B, lb) = items.pop(a), items.pop(b)
        items[nxt] = _merge(A, la, B, lb)
        nxt += 1
    if len(items) != 1:
        raise ValueError("plan does not merge every tensor")
    (T, labels), = items.values()
    order = sorted(range(len(labels)), key=lambda k: labels[k])
    return T.transpose(order), tuple(labels[k] for k in order)


def contract(network: TensorNetwork, plan: list[tuple[int, int]] | None = None) -> complex:
    if not network.tensors:
        return 1 + 0j
    bad = [b for b, deg in enumerate(network.degrees()) if deg != 2]
    if bad:
        raise ValidationError(f"bonds {bad[:5]} do not have degree 2")
    T, labels = contract_open(network, plan)
    if labels:
        raise ValueError("open bonds remain after contraction")
    return complex(T)


def naive_sum(network: TensorNetwork, budget: float = 1e8, chunk: int = 1 << 18) -> complex:
    """Sum over all states, chunk by chunk; each chunk uses numpy's pairwise sum."""
    if not network.tensors:
        return 1 + 0j
    n = network.n_bonds
    N = network.tensors[0].shape[0]
    total = N ** n
    if total > budget:
        raise BudgetExceeded(f"{N}^{n} = {total} states exceed the budget {budget:g}")
    re, im = [], []
    powers = N ** np.arange(n, dtype=np.int64)
    for start in range(0, total, chunk):
        s = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (s[None, :] // powers[:, None]) % N  # [bond, state]
        prod = np.ones(s.shape, dtype=complex)
        for T, bs in zip(network.tensors, network.bonds):
            prod *= T[tuple(digits[b] for b in bs)]
        tot = prod.sum()
        re.append(tot.real)
        im.append(tot.imag)
    return complex(math.fsum(re), math.fsum(im))


# ---------------------------------------------------------------- K_N


def evaluate_cutopen(ctx: RootContext, inp: CutOpenInput, plan=None, method: str = "contract"
                     ) -> StateSum:
    network = assemble_network(ctx, inp)
    if method == "naive":
        tval = naive_sum(network)
    else:
        tval = contract(network, plan)
    weight = 1 + 0j
    for y in inp.weights:
        weight *= y ** (-2 * ctx.p)
    pre = ctx.N ** (-inp.r0) * tval * weight
    return StateSum(pre ** ctx.N, pre, tval, weight, (len(inp.tets), inp.n_bonds))


def evaluate_KN(ctx, d, tri, H, b, z, c, plan=None, method: str = "contract") -> StateSum:
    return evaluate_cutopen(ctx, to_cutopen(ctx, d, tri, H, b, z, c), plan, method)


def evaluate_KN_cutopen(ctx: RootContext, tets: Sequence[DecoratedTetrahedron], n_bonds: int,
                        weights: Sequence[complex], r0: int, plan=None) -> StateSum:
    return evaluate_cutopen(ctx, CutOpenInput(tuple(tets), int(n_bonds), tuple(weights), int(r0)), plan)


def asymptotic_ratio(Ns: Sequence[int], build) -> list[tuple[int, complex]]:
    """Rows ``(N, (2 pi / N) log K_N)`` with the principal log (imaginary part in (-pi, pi]).

    ``build(N)`` returns the arguments ``(ctx, d, tri, H, b, z, c)``.
    """
    rows = []
    for N in Ns:
        K = evaluate_KN(*build(N)).K
        rows.append((N, 2 * math.pi / N * cmath.log(K)))
    return rows
