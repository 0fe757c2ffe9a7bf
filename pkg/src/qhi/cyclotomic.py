"""Root-of-unity context and the special functions the 6j-symbols are built from.

Everything here is double-precision complex. Residues mod N are always
reduced into ``[0, N)`` before use, and powers of omega are read from a
precomputed table so that ``omega**k`` and ``omega**(k + N)`` are bit-identical.
"""
from __future__ import annotations

import cmath
import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import BranchCutError, OffCurveError, PoleError


@dataclass(frozen=True)
class RootContext:
    """The odd integer ``N = 2p + 1`` and the primitive root ``exp(2 pi i / N)``."""

    N: int
    tolerance: float = 1e-9
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 3 or self.N % 2 == 0:
            raise ValueError(f"N must be an odd integer >= 3, got {self.N!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        k = np.arange(self.N)
        table = np.exp(2j * np.pi * k / self.N)
        table[0] = 1.0
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    @property
    def p(self) -> int:
        return (self.N - 1) // 2

    @property
    def omega(self) -> complex:
        return complex(self._table[1 % self.N])

    @property
    def half(self) -> int:
        """The residue standing for 1/2, namely p + 1."""
        return (self.p + 1) % self.N

    half_exponent = half

    @property
    def quarter(self) -> int:
        """The residue standing for 1/4, namely p**2."""
        return (self.p * self.p) % self.N

    @property
    def eighth(self) -> int:
        return (self.quarter * self.half) % self.N

    def mod(self, n) -> int:
        return int(n) % self.N

    def w(self, k) -> complex:
        """omega**k for an integer k."""
        return complex(self._table[int(k) % self.N])

    def w_array(self, k: np.ndarray) -> np.ndarray:
        return self._table[np.mod(k, self.N)]

    def w_half_square(self, m) -> complex:
        """omega**(m**2 / 2), with 1/2 read as p + 1."""
        return self.w(self.half * int(m) * int(m))

    @property
    def roots_of_unity(self) -> np.ndarray:
        return self._table


@dataclass(frozen=True)
class FermatPoint:
    """Homogeneous coordinates on the Fermat curve ``x^N + y^N = z^N``."""

    x: complex
    y: complex
    z: complex

    def residual(self, N: int) -> float:
        scale = max(abs(self.x), abs(self.y), abs(self.z)) ** N
        if scale == 0:
            return 0.0
        return abs(self.x ** N + self.y ** N - self.z ** N) / scale

    def scaled(self, lam: complex) -> "FermatPoint":
        return FermatPoint(lam * self.x, lam * self.y, lam * self.z)


def _check_curve(ctx: RootContext, pt: FermatPoint, tol: float | None):
    tol = ctx.tolerance if tol is None else tol
    res = pt.residual(ctx.N)
    if res > tol:
        raise OffCurveError(f"point off the Fermat curve (relative residual {res:.3e})")


def omega_fermat(ctx: RootContext, pt: FermatPoint, n: int, *, check: bool = True,
                 tol: float | None = None) -> complex:
    """``prod_{j=1..n mod N} y / (z - x omega^j)``; period N on the curve."""
    if check:
        _check_curve(ctx, pt, tol)
    n = ctx.mod(n)
    scale = max(abs(pt.x), abs(pt.z))
    out = 1 + 0j
    for j in range(1, n + 1):
        den = pt.z - pt.x * ctx.w(j)
        if abs(den) <= 1e-14 * scale:
            raise PoleError(f"omega function pole: z - x*omega^{j} vanishes")
        out *= pt.y / den
    return out


def omega_fermat_table(ctx: RootContext, pt: FermatPoint, *, shift: complex = 1.0,
                       check: bool = True, tol: float | None = None) -> np.ndarray:
    """All N values ``omega(x/shift, y, z | n)`` for n = 0..N-1, by cumulative product.

    ``shift`` divides the first coordinate; the inverse 6j-symbols use
    ``shift = omega`` and then the point is deliberately off the curve.
    """
    if check:
        _check_curve(ctx, pt, tol)
    x = pt.x / shift
    scale = max(abs(x), abs(pt.z))
    dens = pt.z - x * ctx.roots_of_unity[np.r_[1:ctx.N]]
    if np.any(np.abs(dens) <= 1e-14 * scale):
        raise PoleError("omega function pole")
    out = np.empty(ctx.N, dtype=complex)
    out[0] = 1.0
    out[1:] = np.cumprod(pt.y / dens)
    return out


def omega_fermat2(ctx: RootContext, pt: FermatPoint, m: int, n: int, **kw) -> complex:
    """Two-argument form ``omega(pt | m - n) * omega^(n^2 / 2)``."""
    return omega_fermat(ctx, pt, m - n, **kw) * ctx.w_half_square(n)


def delta_periodic(ctx: RootContext, n: int) -> int:
    return 1 if int(n) % ctx.N == 0 else 0


def _g_factors(ctx: RootContext, x: complex) -> np.ndarray:
    j = np.arange(1, ctx.N)
    base = 1 - x * ctx.roots_of_unity[j]
    if np.any(np.abs(base) < 1e-14):
        raise PoleError(f"g has a branch point at x = {x!r}")
    return base ** (j / ctx.N)


def g_func(ctx: RootContext, x: complex) -> complex:
    """``prod_{j=1}^{N-1} (1 - x omega^j)^(j/N)``, principal branch per factor.

    With principal powers every factor equals 1 at x = 0, so g(0) = 1 holds
    without any extra normalizing phase.
    """
    return complex(np.prod(_g_factors(ctx, complex(x))))


def h_func(ctx: RootContext, x: complex) -> complex:
    x = complex(x)
    if x == 0:
        raise PoleError("h is singular at 0")
    return x ** (-ctx.p) * g_func(ctx, x) / g_func(ctx, 1.0)


def bracket(ctx: RootContext, x: complex) -> complex:
    """``N^-1 (1 - x^N) / (1 - x)``, evaluated as the geometric sum (so [1] = 1)."""
    x = complex(x)
    return complex(np.polyval(np.ones(ctx.N), x)) / ctx.N


@dataclass(frozen=True)
class RootDetermination:
    """A rule assigning an N-th root to every complex value.

    ``seed=None`` is the principal branch. Any other seed multiplies the
    principal root by ``omega^k(v)``, where ``k`` is a hash of the bit pattern
    of ``v``; the rule stays a function of the value, as a determination must.
    """

    N: int
    seed: int | None = None

    def shift(self, v: complex) -> int:
        if self.seed is None:
            return 0
        v = complex(v)
        raw = struct.pack("<qdd", self.seed, v.real + 0.0, v.imag + 0.0)
        return int.from_bytes(hashlib.sha256(raw).digest()[:8], "little") % self.N

    def root(self, v: complex) -> complex:
        v = complex(v)
        if v == 0:
            return 0j
        r = abs(v) ** (1.0 / self.N) * cmath.exp(1j * cmath.phase(v) / self.N)
        k = self.shift(v)
        if k:
            r *= cmath.exp(2j * math.pi * k / self.N)
        return r


def _on_cut(z: complex) -> bool:
    return abs(z.imag) <= 1e-15 * max(1.0, abs(z)) and (z.real < 0 or z.real > 1)


def rogers_dilog(z: complex, *, shifted: bool = True) -> complex:
    """Rogers dilogarithm ``1/2 log z log(1-z) - int_0^z log(1-t)/t dt`` (- pi^2/6).

    The integral runs along the segment [0, z], which never meets the cut of
    log(1 - t) when z is admissible, so principal logs give the analytic
    branch. ``shifted=False`` drops the constant -pi^2/6.
    """
    z = complex(z)
    if _on_cut(z):
        raise BranchCutError(f"{z!r} lies on ]-inf,0[ U ]1,inf[")
    const = -math.pi ** 2 / 6 if shifted else 0.0
    if z == 0:
        return complex(const)
    if z == 1:
        return complex(math.pi ** 2 / 6 + const)

    def f(s):
        if s == 0.0:
            return -z
        return cmath.log(1 - s * z) / s

    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    re, _ = integrate.quad(lambda s: f(s).real, 0.0, 1.0, **opts)
    im, _ = integrate.quad(lambda s: f(s).imag, 0.0, 1.0, **opts)
    return 0.5 * cmath.log(z) * cmath.log(1 - z) - (re + 1j * im) + const


def five_term_arguments(x: complex, y: complex):
    x, y = complex(x), complex(y)
    d = 1 - x * y
    if d == 0:
        raise BranchCutError("1 - xy vanishes")
    return x, y, x * y, x * (1 - y) / d, y * (1 - x) / d


def five_term_residual(x: complex, y: complex, *, shifted: bool = False) -> float:
    """``|R(x) + R(y) - R(xy) - R(x(1-y)/(1-xy)) - R(y(1-x)/(1-xy))|``.

    The identity only balances for the unshifted normalization: with the
    -pi^2/6 constant the two sides differ by exactly pi^2/6.
    """
    a = five_term_arguments(x, y)
    for v in a:
        if _on_cut(v):
            raise BranchCutError(f"derived argument {v!r} on a cut")
    R = [rogers_dilog(v, shifted=shifted) for v in a]
    return abs(R[0] + R[1] - R[2] - R[3] - R[4])
