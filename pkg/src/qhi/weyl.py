"""Standard cyclic representations of the Weyl algebra and Clebsch-Gordan operators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclotomic import FermatPoint, RootContext, RootDetermination, h_func, omega_fermat_table
from .errors import NotRegularError


@dataclass(frozen=True)
class StandardRep:
    """Cyclic representation labelled by nonzero parameters ``(t, x)``."""

    t: complex
    x: complex

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "x", complex(self.x))
        if self.t == 0:
            raise ValueError("t must be nonzero")
        if self.x == 0:
            raise ValueError("x must be nonzero (nilpotent representations are excluded)")

    def tN(self, N: int) -> complex:
        return self.t ** N

    def xN(self, N: int) -> complex:
        return self.x ** N


def inverse_rep(r: StandardRep) -> StandardRep:
    return StandardRep(1 / r.t, -r.x)


def conjugate_rep(r: StandardRep) -> StandardRep:
    return StandardRep(r.t.conjugate(), r.x.conjugate())


def _close(a: complex, b: complex, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def equivalent(p: StandardRep, q: StandardRep, N: int, tol: float = 1e-9) -> bool:
    return (_close(p.t ** (2 * N), q.t ** (2 * N), tol)
            and _close(p.t ** N * p.x ** N, q.t ** N * q.x ** N, tol))


def product_power(N: int, p: StandardRep, q: StandardRep) -> complex:
    """The value ``t_p^N x_q^N + x_p^N / t_q^N`` whose N-th root is ``x_pq``."""
    return p.t ** N * q.x ** N + p.x ** N / q.t ** N


def product_rep(ctx: RootContext, d: RootDetermination, p: StandardRep, q: StandardRep,
                x_pq: complex | None = None, *, tol: float | None = None) -> StandardRep:
    """Parameters of the cyclic summand of ``p (x) q``.

    With ``x_pq`` given (for instance by a cocycle edge) its N-th power is
    checked against the product relation instead of choosing a root.
    """
    tol = ctx.tolerance if tol is None else tol
    N = ctx.N
    a, b = p.t ** N * q.x ** N, p.x ** N / q.t ** N
    s = a + b
    scale = max(abs(a), abs(b))
    if abs(s) <= tol * scale:
        raise NotRegularError("pair is not regular: t_p^N x_q^N + x_p^N/t_q^N vanishes",
                              where=(p, q))
    if x_pq is None:
        return StandardRep(p.t * q.t, d.root(s))
    x_pq = complex(x_pq)
    if abs(x_pq ** N - s) > tol * scale:
        raise NotRegularError(f"supplied x_pq violates the product relation "
                              f"(residual {abs(x_pq ** N - s) / scale:.3e})", where=(p, q))
    return StandardRep(p.t * q.t, x_pq)


@dataclass(frozen=True)
class CGOBasisElement:
    """``matrix[i, j, k]`` is the component ``K_alpha(p,q)_{i,j}^k``."""

    alpha: int
    matrix: np.ndarray

    def as_operator(self) -> np.ndarray:
        """The map ``V_pq -> V_p (x) V_q`` as an ``N^2 x N`` matrix, rows ``(i, j)``."""
        N = self.matrix.shape[0]
        return self.matrix.reshape(N * N, N)


def cgo(ctx: RootContext, d: RootDetermination, p: StandardRep, q: StandardRep, alpha: int,
        pq: StandardRep | None = None) -> CGOBasisElement:
    N = ctx.N
    if pq is None:
        pq = product_rep(ctx, d, p, q)
    else:
        pq = product_rep(ctx, d, p, q, pq.x)
    alpha = ctx.mod(alpha)
    nu = h_func(ctx, pq.x / (p.t * q.x))
    pt = FermatPoint(p.t * q.x, p.x / q.t, pq.x)
    # omega(pt | i, alpha) = omega(pt | i - alpha) * omega^{alpha^2/2}
    table = omega_fermat_table(ctx, pt, tol=max(ctx.tolerance, 1e-8))
    i = np.arange(N)
    j = np.arange(N)
    row = nu * table[(i - alpha) % N] * ctx.w_half_square(alpha)
    col = ctx.w_array(alpha * j)
    out = np.zeros((N, N, N), dtype=complex)
    I, J = np.meshgrid(i, j, indexing="ij")
    out[I, J, (I + J) % N] = row[:, None] * col[None, :]
    return CGOBasisElement(alpha, out)


def weyl_matrices(ctx: RootContext, r: StandardRep) -> tuple[np.ndarray, np.ndarray]:
    """Images ``(p(E), p(D)) = (t^2 Z, t x X)`` on ``C^N``; for test oracles only."""
    N = ctx.N
    Z = np.diag(ctx.roots_of_unity.astype(complex))
    X = np.zeros((N, N), dtype=complex)
    X[(np.arange(N) + 1) % N, np.arange(N)] = 1.0
    return r.t ** 2 * Z, r.t * r.x * X


def coproduct(ctx: RootContext, p: StandardRep, q: StandardRep) -> tuple[np.ndarray, np.ndarray]:
    """``(p (x) q)(E)`` and ``(p (x) q)(D)`` for ``Delta E = E (x) E``, ``Delta D = E (x) D + D (x) 1``."""
    Ep, Dp = weyl_matrices(ctx, p)
    Eq, Dq = weyl_matrices(ctx, q)
    one = np.eye(ctx.N)
    return np.kron(Ep, Eq), np.kron(Ep, Dq) + np.kron(Dp, one)
