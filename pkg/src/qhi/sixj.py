"""Cyclic 6j-symbols, their charged versions, S/T matrices and identity checkers.

Tensors are indexed by plain residues: ``R[a, b, c, d]`` stands for
``R_{a,b}^{c,d}`` and ``Rbar[c, d, a, b]`` for ``Rbar_{c,d}^{a,b}``. Only the
six x-parameters of a regular triple enter, packed as
``X = (x_p, x_q, x_r, x_pq, x_qr, x_pqr)``.

Identities involving ``h`` hold exactly only up to a global N-th root of
unity, because ``h`` is built from principal-branch fractional powers. Every
checker therefore reports both the exact residual and the residual after
optimizing over the N-th roots of unity (``root_index`` records which one).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .cyclotomic import (FermatPoint, RootContext, RootDetermination, bracket, h_func,
                         omega_fermat_table)
from .errors import CalibrationError, NotRegularError
from .weyl import StandardRep, cgo, product_rep

SixX = tuple  # (x_p, x_q, x_r, x_pq, x_qr, x_pqr)


@dataclass(frozen=True)
class SixJTensor:
    components: np.ndarray
    kind: str
    X: SixX
    charges: tuple[int, int] | None = None

    def matrix(self) -> np.ndarray:
        """Rows are the first index pair, columns the second."""
        N = self.components.shape[0]
        return self.components.reshape(N * N, N * N)


def regular_triple(ctx: RootContext, d: RootDetermination, p: StandardRep, q: StandardRep,
                   r: StandardRep) -> tuple[StandardRep, StandardRep, StandardRep]:
    """``(pq, qr, pqr)`` with ``pqr`` computed as ``(pq) r``."""
    pq = product_rep(ctx, d, p, q)
    qr = product_rep(ctx, d, q, r)
    pqr = product_rep(ctx, d, pq, r)
    # (pq)r and p(qr) agree on N-th powers; check the second bracketing is regular too
    product_rep(ctx, d, p, qr, pqr.x, tol=max(ctx.tolerance, 1e-8))
    return pq, qr, pqr


def six_x(ctx: RootContext, d: RootDetermination, p, q, r) -> SixX:
    pq, qr, pqr = regular_triple(ctx, d, p, q, r)
    return (p.x, q.x, r.x, pq.x, qr.x, pqr.x)


def fermat_residual(N: int, X: SixX) -> float:
    """Relative residual of ``(x_p x_r)^N = (x_pq x_qr)^N - (x_pqr x_q)^N``."""
    xp, xq, xr, xpq, xqr, xpqr = X
    a, b, c = (xpqr * xq) ** N, (xp * xr) ** N, (xpq * xqr) ** N
    return abs(a + b - c) / max(abs(a), abs(b), abs(c))


def _fermat_point(X: SixX) -> FermatPoint:
    xp, xq, xr, xpq, xqr, xpqr = X
    return FermatPoint(xpqr * xq, xp * xr, xpq * xqr)


def _nu(ctx: RootContext, X: SixX) -> complex:
    xp, xq, xr, xpq, xqr, xpqr = X
    return h_func(ctx, xpq * xqr / (xpqr * xq))


def _grid(N):
    return np.meshgrid(*(np.arange(N),) * 3, indexing="ij")


def R_from_x(ctx: RootContext, X: SixX) -> np.ndarray:
    N = ctx.N
    X = tuple(complex(v) for v in X)
    table = omega_fermat_table(ctx, _fermat_point(X), tol=max(ctx.tolerance, 1e-8))
    nu = _nu(ctx, X)
    A, B, C = _grid(N)
    D = (B - C) % N
    vals = nu * ctx.w_array(A * D + ctx.half * A * A) * table[(C - A) % N]
    out = np.zeros((N,) * 4, dtype=complex)
    out[A, B, C, D] = vals
    return out


def Rbar_from_x(ctx: RootContext, X: SixX) -> np.ndarray:
    N = ctx.N
    X = tuple(complex(v) for v in X)
    xp, xq, xr, xpq, xqr, xpqr = X
    nu = _nu(ctx, X)
    pref = bracket(ctx, xpqr * xq / (xpq * xqr)) / nu
    table = omega_fermat_table(ctx, _fermat_point(X), shift=ctx.omega, check=False)
    C, D, A = _grid(N)
    Bi = (C + D) % N
    vals = pref * ctx.w_array(-A * D - ctx.half * A * A) / table[(C - A) % N]
    out = np.zeros((N,) * 4, dtype=complex)
    out[C, D, A, Bi] = vals
    return out


def cR_from_x(ctx: RootContext, X: SixX, a: int, c: int) -> np.ndarray:
    N = ctx.N
    a, c = ctx.mod(a), ctx.mod(c)
    xpq, xqr = complex(X[3]), complex(X[4])
    R = R_from_x(ctx, X)
    i = np.arange(N)
    shifted = R[np.ix_(i, (i - a) % N, (i - a) % N, i)]
    al, ga = i[:, None, None, None], i[None, None, :, None]
    phase = ctx.w_array(c * (ga - al) - a * c * ctx.half)
    return (xpq * xqr) ** ctx.p * phase * shifted


def cRbar_from_x(ctx: RootContext, X: SixX, a: int, c: int) -> np.ndarray:
    N = ctx.N
    a, c = ctx.mod(a), ctx.mod(c)
    xpq, xqr = complex(X[3]), complex(X[4])
    Rb = Rbar_from_x(ctx, X)
    i = np.arange(N)
    shifted = Rb[np.ix_((i + a) % N, i, i, (i + a) % N)]
    ga, al = i[:, None, None, None], i[None, None, :, None]
    phase = ctx.w_array(c * (ga - al) + a * c * ctx.half)
    return (xpq * xqr) ** ctx.p * phase * shifted


def build_R(ctx, d, p, q, r) -> SixJTensor:
    X = six_x(ctx, d, p, q, r)
    return SixJTensor(R_from_x(ctx, X), "R", X)


def build_Rbar(ctx, d, p, q, r) -> SixJTensor:
    X = six_x(ctx, d, p, q, r)
    return SixJTensor(Rbar_from_x(ctx, X), "Rbar", X)


def build_cR(ctx, d, p, q, r, a: int, c: int) -> SixJTensor:
    X = six_x(ctx, d, p, q, r)
    return SixJTensor(cR_from_x(ctx, X, a, c), "cR", X, (ctx.mod(a), ctx.mod(c)))


def build_cRbar(ctx, d, p, q, r, a: int, c: int) -> SixJTensor:
    X = six_x(ctx, d, p, q, r)
    return SixJTensor(cRbar_from_x(ctx, X, a, c), "cRbar", X, (ctx.mod(a), ctx.mod(c)))


# ---------------------------------------------------------------- comparison


@dataclass
class CheckReport:
    name: str
    residual: float
    exact_residual: float
    root_index: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual,
                "exact_residual": self.exact_residual, "root_index": self.root_index,
                "pass": self.passed, **self.details}


def compare(ctx: RootContext, lhs: np.ndarray, rhs: np.ndarray, *, up_to_root: bool = True
            ) -> tuple[float, float, int]:
    """Relative residuals ``max|L - w^k R| / max|R|``: (best over k, at k = 0, best k)."""
    scale = max(np.abs(rhs).max(), 1e-300)
    exact = float(np.abs(lhs - rhs).max() / scale)
    if not up_to_root:
        return exact, exact, 0
    best, kbest = exact, 0
    for k in range(1, ctx.N):
        res = float(np.abs(lhs - ctx.w(k) * rhs).max() / scale)
        if res < best:
            best, kbest = res, k
    return best, exact, kbest


def _report(ctx, name, lhs, rhs, tol, up_to_root=True, **details) -> CheckReport:
    res, exact, k = compare(ctx, lhs, rhs, up_to_root=up_to_root)
    return CheckReport(name, res, exact, k, res < tol, details)


def slot_operator(N: int, T: np.ndarray, slots: tuple[int, int]) -> np.ndarray:
    """Embed a rank-4 ``T[a, b, c, d]`` acting on two of three tensor slots."""
    full = np.einsum("abcd,ef->abecdf", T, np.eye(N))
    s1, s2 = slots
    s3 = ({0, 1, 2} - {s1, s2}).pop()
    perm = [0, 0, 0]
    perm[s1], perm[s2], perm[s3] = 0, 1, 2
    full = full.transpose(perm + [3 + k for k in perm])
    return full.reshape(N ** 3, N ** 3)


# ---------------------------------------------------------------- checkers


def check_sixj_relation(ctx, d, p, q, r, tol: float = 1e-9) -> CheckReport:
    """``K_a(p,q) K_b(pq,r) = sum R_{ab}^{cd} K_c(p,qr) K_d(q,r)`` on all components."""
    N = ctx.N
    pq, qr, pqr = regular_triple(ctx, d, p, q, r)
    R = R_from_x(ctx, (p.x, q.x, r.x, pq.x, qr.x, pqr.x))
    K1 = [cgo(ctx, d, p, q, a, pq).matrix for a in range(N)]
    K2 = [cgo(ctx, d, pq, r, b, pqr).matrix for b in range(N)]
    K3 = [cgo(ctx, d, p, qr, c, pqr).matrix for c in range(N)]
    K4 = [cgo(ctx, d, q, r, e, qr).matrix for e in range(N)]
    lhs = np.array([[np.einsum("ijm,mln->ijln", K1[a], K2[b]) for b in range(N)]
                    for a in range(N)])
    base = np.array([[np.einsum("imn,jlm->ijln", K3[c], K4[e]) for e in range(N)]
                     for c in range(N)])
    rhs = np.einsum("abcd,cdijln->abijln", R, base)
    return _report(ctx, "sixj_relation", lhs, rhs, tol)


def cgo_as_sixj(ctx, d, p: StandardRep, q: StandardRep, pq: StandardRep | None = None
                ) -> np.ndarray:
    """The CGO family read as a 6j-type tensor ``R(p,q)[alpha, k, i, j]``."""
    N = ctx.N
    comps = np.array([cgo(ctx, d, p, q, a, pq).matrix for a in range(N)])  # [a, i, j, k]
    return comps.transpose(0, 3, 1, 2)


def check_inverse(ctx, d, p, q, r, tol: float = 1e-9) -> CheckReport:
    X = six_x(ctx, d, p, q, r)
    N = ctx.N
    prod = R_from_x(ctx, X).reshape(N * N, N * N) @ Rbar_from_x(ctx, X).reshape(N * N, N * N)
    return _report(ctx, "inverse", prod, np.eye(N * N), tol, up_to_root=False)


def check_orthogonality(ctx, d, p, q, r, a: int, c: int, tol: float = 1e-9
                        ) -> tuple[CheckReport, CheckReport]:
    """Orthogonality and its partial trace (the bubble relation)."""
    N = ctx.N
    X = six_x(ctx, d, p, q, r)
    s = (X[3] * X[4]) ** (2 * ctx.p)
    M = (cR_from_x(ctx, X, a, c).reshape(N * N, N * N)
         @ cRbar_from_x(ctx, X, -a, -c).reshape(N * N, N * N))
    orth = _report(ctx, "orthogonality", M, s * np.eye(N * N), tol, up_to_root=False)
    bubble = np.einsum("abcb->ac", M.reshape(N, N, N, N))
    bub = _report(ctx, "bubble", bubble, N * s * np.eye(N), tol, up_to_root=False)
    return orth, bub


def pentagon_charge_labels(i, j, k, l, m):
    """Charge pairs of the five tensors, in the order they appear in the relation."""
    return (i, m - k), (j, l + m), (k, l - i), (j + k, l), (i + j, m)


def check_pentagon(ctx, d, p, q, r, s, i, j, k, l, m, tol: float = 1e-9) -> CheckReport:
    """``cR_12(p,q,r) cR_13(p,qr,s) cR_23(q,r,s) = x_qr^{2p} cR_23(pq,r,s) cR_12(p,q,rs)``."""
    N = ctx.N
    pq = product_rep(ctx, d, p, q)
    qr = product_rep(ctx, d, q, r)
    rs = product_rep(ctx, d, r, s)
    c4, c2, c0, c1, c3 = pentagon_charge_labels(i, j, k, l, m)
    T4 = build_cR(ctx, d, p, q, r, *c4).components
    T2 = build_cR(ctx, d, p, qr, s, *c2).components
    T0 = build_cR(ctx, d, q, r, s, *c0).components
    T1 = build_cR(ctx, d, pq, r, s, *c1).components
    T3 = build_cR(ctx, d, p, q, rs, *c3).components
    lhs = slot_operator(N, T4, (0, 1)) @ slot_operator(N, T2, (0, 2)) @ slot_operator(N, T0, (1, 2))
    rhs = qr.x ** (2 * ctx.p) * (slot_operator(N, T1, (1, 2)) @ slot_operator(N, T3, (0, 1)))
    return _report(ctx, "pentagon", lhs, rhs, tol)


def check_duality(ctx, d, p, q, r, a: int, c: int, tol: float = 1e-9) -> CheckReport:
    """``cRbar(p*,q*,r*|a,c)_{g,d}^{a,b} = conj(cR(p,q,r|a,c)_{-a,-b}^{-g,-d})``."""
    N = ctx.N
    X = six_x(ctx, d, p, q, r)
    Xc = tuple(complex(v).conjugate() for v in X)
    lhs = cRbar_from_x(ctx, Xc, a, c)
    neg = (-np.arange(N)) % N
    A = cR_from_x(ctx, X, a, c)[np.ix_(neg, neg, neg, neg)]
    rhs = np.conj(A).transpose(2, 3, 0, 1)
    return _report(ctx, "duality", lhs, rhs, tol, up_to_root=False)


# ---------------------------------------------------------------- S and T


def zeta_closed_form(N: int) -> complex:
    """``(-1)^p exp(2 pi i (1-N)(N-2) / (24 N)) omega^{1/8}`` read literally."""
    p = (N - 1) // 2
    eighth = (p * p * (p + 1)) % N
    return ((-1) ** p * cmath.exp(2j * math.pi * (1 - N) * (N - 2) / (24 * N))
            * cmath.exp(2j * math.pi * eighth / N))


@dataclass(frozen=True)
class SymmetryMatrices:
    T_lower: np.ndarray
    T_upper: np.ndarray
    S_lower: np.ndarray
    S_upper: np.ndarray
    zeta: complex
    correction: tuple[int, int] = (1, 0)  # zeta = closed form * sign * omega^k


def _symmetry_from_zeta(ctx: RootContext, zeta: complex,
                        correction: tuple[int, int] = (1, 0)) -> SymmetryMatrices:
    N = ctx.N
    m = np.arange(N)
    delta = ((m[:, None] + m[None, :]) % N == 0).astype(complex)
    Tl = delta * ctx.w_array(ctx.half * m * m)[:, None] / zeta
    Tu = delta * ctx.w_array(-ctx.half * m * m)[:, None] * zeta
    Sl = ctx.w_array(np.outer(m, m)) / math.sqrt(N)
    return SymmetryMatrices(Tl, Tu, Sl, Sl.conj(), zeta, correction)


def symmetry_relations(ctx: RootContext, X: SixX, a: int, c: int, sm: SymmetryMatrices):
    """The three (lhs, rhs) pairs; ``b = 1/2 - a - c``."""
    N = ctx.N
    a, c = ctx.mod(a), ctx.mod(c)
    b = (ctx.half - a - c) % N
    xp, xq, xr, xpq, xqr, xpqr = X
    A = cR_from_x(ctx, X, a, c)
    q4 = ctx.quarter
    L1 = np.einsum("xbyd,gy,ax->gbad", A, sm.T_lower, sm.T_upper)
    R1 = ctx.w(a * q4) * cRbar_from_x(ctx, (-xp, xpq, xr, xq, xpqr, xqr), a, b)
    L2 = np.einsum("xbgy,dy,ax->bdag", A, sm.T_lower, sm.S_upper)
    R2 = ctx.w(-c * q4) * cRbar_from_x(ctx, (xpq, -xq, xqr, xp, xr, xpqr), b, c)
    L3 = np.einsum("axgy,dy,bx->adgb", A, sm.S_lower, sm.S_upper)
    R3 = ctx.w(a * q4) * cRbar_from_x(ctx, (xp, xqr, -xr, xpqr, xq, xpq), a, b)
    return [(L1, R1), (L2, R2), (L3, R3)]


def _calibration_draws(ctx: RootContext, count: int = 9):
    rng = np.random.default_rng(20240601 + ctx.N)
    d = RootDetermination(ctx.N)
    for _ in range(count):
        reps = random_regular_reps(ctx, d, rng, 3)
        a, c = (int(v) for v in rng.integers(0, ctx.N, 2))
        yield six_x(ctx, d, *reps), a, c


@lru_cache(maxsize=None)
def _calibrated(N: int, tolerance: float) -> SymmetryMatrices:
    # zeta cancels from the first relation, so the second one pins it. Single
    # draws can sit across the cut of h, so the candidates are put to a vote.
    ctx = RootContext(N, tolerance)
    z0 = zeta_closed_form(N)
    candidates = [(sign, k) for sign in (1, -1) for k in range(N)]
    mats = {cd: _symmetry_from_zeta(ctx, z0 * cd[0] * ctx.w(cd[1]), cd) for cd in candidates}
    votes = {cd: 0 for cd in candidates}
    for X, a, c in _calibration_draws(ctx):
        res = {}
        for cd, sm in mats.items():
            L, R = symmetry_relations(ctx, X, a, c, sm)[1]
            res[cd] = compare(ctx, L, R, up_to_root=False)[0]
        cd = min(res, key=res.get)
        if res[cd] < 1e-6:
            votes[cd] += 1
    winner = max(candidates, key=lambda cd: votes[cd])
    if votes[winner] == 0:
        raise CalibrationError("no unimodular zeta fits the second symmetry relation")
    return mats[winner]


def build_symmetry_matrices(ctx: RootContext, *, calibrate: bool = True) -> SymmetryMatrices:
    """S and T with the literal closed-form zeta, or after calibration.

    Calibration searches the 2N corrections ``+-omega^k`` of the closed form
    and keeps the one fitting the second symmetry relation on a fixed draw.
    """
    if not calibrate:
        return _symmetry_from_zeta(ctx, zeta_closed_form(ctx.N))
    return _calibrated(ctx.N, ctx.tolerance)


def perturbed(sm: SymmetryMatrices, factor: complex) -> SymmetryMatrices:
    """Same matrices rebuilt with ``zeta * factor`` (a sensitivity control)."""
    zeta = sm.zeta * factor
    return replace(sm, T_lower=sm.T_lower * sm.zeta / zeta, T_upper=sm.T_upper * zeta / sm.zeta,
                   zeta=zeta)


def solve_zeta_prime(sm: SymmetryMatrices) -> tuple[complex, float]:
    """Solve ``S^2 = zeta' (S T)^3`` from the largest entry; return (zeta', residual)."""
    S, T = sm.S_lower, sm.T_lower
    lhs = S @ S
    st3 = np.linalg.matrix_power(S @ T, 3)
    idx = np.unravel_index(np.abs(st3).argmax(), st3.shape)
    zp = lhs[idx] / st3[idx]
    return complex(zp), float(np.abs(lhs - zp * st3).max())


def check_symmetry(ctx, d, p, q, r, a: int, c: int, tol: float = 1e-8,
                   sm: SymmetryMatrices | None = None) -> list[CheckReport]:
    sm = build_symmetry_matrices(ctx) if sm is None else sm
    X = six_x(ctx, d, p, q, r)
    out = []
    for n, (L, R) in enumerate(symmetry_relations(ctx, X, a, c, sm), start=1):
        out.append(_report(ctx, f"symmetry{n}", L, R, tol))
    return out


# ---------------------------------------------------------------- draws


def random_rep(rng: np.random.Generator, scale: float = 0.3) -> StandardRep:
    """A representation near ``(1, 1)``, away from the poles of the kernels."""
    t, x = 1 + scale * (rng.normal(size=(2, 2)) @ np.array([1, 1j]))
    return StandardRep(t, x)


def random_regular_reps(ctx: RootContext, d: RootDetermination, rng: np.random.Generator,
                        count: int, scale: float = 0.3, margin: float = 0.05,
                        max_tries: int = 1000) -> list[StandardRep]:
    """``count`` reps whose consecutive products are regular with a pole margin.

    ``margin`` bounds from below the distance of every Fermat kernel
    denominator to zero, relative to the point's scale.
    """
    for _ in range(max_tries):
        reps = [random_rep(rng, scale) for _ in range(count)]
        try:
            ok = all(_margin_ok(ctx, six_x(ctx, d, *reps[i:i + 3]), margin)
                     for i in range(count - 2))
            if count >= 4:
                qr = product_rep(ctx, d, reps[1], reps[2])
                pq = product_rep(ctx, d, reps[0], reps[1])
                rs = product_rep(ctx, d, reps[2], reps[3])
                ok = ok and all(_margin_ok(ctx, six_x(ctx, d, *t), margin) for t in
                                ((reps[0], qr, reps[3]), (pq, reps[2], reps[3]),
                                 (reps[0], reps[1], rs)))
        except (NotRegularError, ZeroDivisionError):
            continue
        if ok:
            return reps
    raise NotRegularError("could not draw a regular sequence")


def _margin_ok(ctx: RootContext, X: SixX, margin: float) -> bool:
    pt = _fermat_point(X)
    scale = max(abs(pt.x), abs(pt.z))
    dens = pt.z - pt.x * ctx.roots_of_unity
    dens_shift = pt.z - pt.x / ctx.omega * ctx.roots_of_unity
    return bool(np.abs(dens).min() > margin * scale and np.abs(dens_shift).min() > margin * scale)
