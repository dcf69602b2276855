"""Expansions of the flat Hilbert transform on wave packets and the first two
terms of the Hilbert transform of a perturbed flat surface."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.typing import NDArray

from . import quat
from .field import Field, Grid, slow_deriv

# Sign of the k d_{alpha1 beta1} term in the second-order piece.  The printed
# "+" leaves an O(eps^2) error; "-" matches the exact multiplier (see tests).
SECOND_ORDER_K_SIGN = -1.0


@dataclass(frozen=True)
class Packet:
    """f(alpha, beta) = F(eps alpha, eps beta) e^{j k alpha}."""

    F: NDArray
    grid: Grid
    k: float
    eps: float

    def band_field(self, bands: int = 1, values: NDArray | None = None) -> Field:
        base = Field.zeros(self.grid, bands, self.k, self.eps)
        return Field.scalar(base, self.F if values is None else values, 1)

    def realize(self, n_fast: int) -> Field:
        return self.band_field().realize(n_fast)


def h0_term(pk: Packet, order: int, k_sign: float = SECOND_ORDER_K_SIGN) -> Field:
    """The order-th Taylor piece of the flat Hilbert transform on the packet,
    in carrier-band form and without its eps^order prefactor.  Derivatives
    are taken in the slow variables."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    k, g = pk.k, pk.grid
    F = pk.F
    d = lambda nx, ny: pk.band_field(values=slow_deriv(F, g, nx, ny))
    if k == 0:
        return pk.band_field().hilbert() if order == 0 else pk.band_field() * 0.0
    ak = abs(k)
    if order == 0:
        return pk.band_field() * (-np.sign(k))
    if order == 1:
        return d(0, 1).lmul(quat.I) * (-1.0 / ak)
    if order == 2:
        return d(0, 2) * (-1.0 / (2 * k * ak)) + d(1, 1).lmul(quat.K) * (k_sign / (k * ak))
    return (
        d(1, 2).lmul(quat.J) * (-1.0 / ak**3)
        + d(2, 1).lmul(quat.I) * (1.0 / ak**3)
        + d(0, 3).lmul(quat.I) * (-0.5 / ak**3)
    )


def h0_expansion(pk: Packet, order: int, n_fast: int | None = None, k_sign: float = SECOND_ORDER_K_SIGN) -> Field:
    """Order-th piece applied to the packet, realized on the fast grid when n_fast is given."""
    t = h0_term(pk, order, k_sign)
    return t.realize(n_fast) if n_fast else t


def h0_truncated(pk: Packet, upto: int = 3, k_sign: float = SECOND_ORDER_K_SIGN) -> Field:
    out = h0_term(pk, 0, k_sign)
    for j in range(1, upto + 1):
        out = out + h0_term(pk, j, k_sign) * pk.eps**j
    return out


def h0_truncation_error(pk: Packet, s: float, n_fast: int = 256, upto: int = 3,
                        k_sign: float = SECOND_ORDER_K_SIGN) -> float:
    """H^s norm of exact flat Hilbert minus the truncated expansion, on the fast grid."""
    f = pk.realize(n_fast)
    approx = h0_truncated(pk, upto, k_sign).realize(n_fast)
    return (f.hilbert() - approx).sobolev(s)


# perturbed-surface terms --------------------------------------------------------

@dataclass(frozen=True)
class SurfaceSlices:
    """Components of a surface perturbation lambda = x i + y j + z k."""

    x: Field
    y: Field
    z: Field

    @classmethod
    def from_lambda(cls, lam: Field) -> "SurfaceSlices":
        return cls(lam.component(1), lam.component(2), lam.component(3))

    @property
    def p1(self) -> Field:
        return self.x + self.z.lmul(quat.J)

    @property
    def p2(self) -> Field:
        return self.y - self.z.lmul(quat.I)

    def lam(self) -> Field:
        return self.x.lmul(quat.I) + self.y.lmul(quat.J) + self.z.lmul(quat.K)

    def scaled(self, c: float) -> "SurfaceSlices":
        return SurfaceSlices(self.x * c, self.y * c, self.z * c)


def comm(p: Field, g: Field, op=Field.hilbert) -> Field:
    """[p, op] g = p op(g) - op(p g)."""
    return p * op(g) - op(p * g)


def comm2(p: Field, q: Field, g: Field, op=Field.hilbert) -> Field:
    """[p, [q, op]] g."""
    return p * comm(q, g, op) - comm(q, p * g, op)


def _d(f: Field, i: int) -> Field:
    return f.d(i)


def h1_full(f: Field, s: SurfaceSlices) -> Field:
    """First-order term: sum_i [p_i, H0] d_i f."""
    return comm(s.p1, f.d(0)) + comm(s.p2, f.d(1))


def h1_components(f: Field, s: SurfaceSlices) -> Field:
    """Same operator written with the raw components and d_3 = k D."""
    return comm(s.x, f.d(0)) + comm(s.y, f.d(1)) + comm(s.z, f.dirac().lmul(quat.K))


def h2_bilinear(f: Field, s: SurfaceSlices, t: SurfaceSlices) -> Field:
    """B(s, t) f with B(s, s) equal to the second-order term."""
    ps = (s.p1, s.p2)
    qs = (t.p1, t.p2)
    df = (f.d(0), f.d(1))
    out = None
    for i in range(2):
        for j in range(2):
            a = -comm(ps[i], qs[j].d(i) * df[j])
            b = comm2(ps[i], qs[j], df[j].d(i)) * 0.5
            out = a + b if out is None else out + a + b
    return out


def h2_full(f: Field, s: SurfaceSlices) -> Field:
    return h2_bilinear(f, s, s)


def h2_symmetric(f: Field, s: SurfaceSlices, t: SurfaceSlices) -> Field:
    return (h2_bilinear(f, s, t) + h2_bilinear(f, t, s)) * 0.5


def h2_components(f: Field, s: SurfaceSlices) -> Field:
    """Second-order term from the three-index form with d_3 = k D."""
    lam = (s.x, s.y, s.z)
    d3 = lambda g: g.dirac().lmul(quat.K)
    der = (lambda g: g.d(0), lambda g: g.d(1), d3)
    out = None
    for i in range(3):
        for j in range(3):
            a = -comm(lam[i], der[i](lam[j]) * der[j](f))
            b = comm2(lam[i], lam[j], der[i](der[j](f))) * 0.5
            out = a + b if out is None else out + a + b
    return out


# multiscale pieces -------------------------------------------------------------

def h_leading(f: Field) -> Field:
    """Leading-order operator: -sgn(m k) on carrier band m, exact flat Hilbert on band 0."""
    m = f.band_index()[:, 0, 0]
    fac = np.where(m != 0, -np.sign(m * f.k), 0.0)
    return f.band_scale(fac) + f.band(0).hilbert()


def h_first(f: Field) -> Field:
    """First-order piece -(1/|m k|) i d_beta1 on band m (zero on band 0)."""
    m = f.band_index()[:, 0, 0]
    with np.errstate(divide="ignore"):
        fac = np.where(m != 0, -1.0 / np.abs(np.where(m != 0, m, 1) * f.k), 0.0)
    return f.d_slow(1).band_scale(fac).lmul(quat.I)


def h_multiscale(f: Field, correctors: Mapping[int, SurfaceSlices], which: str) -> Field:
    """Multiscale operators in carrier-band form (eps = 1 slow calculus)."""
    need = {"H1_1": (1,), "H1_2": (1, 2), "H2_2": (1,)}
    if which not in need:
        raise ValueError(f"unknown multiscale operator {which!r}")
    for o in need[which]:
        if o not in correctors:
            raise KeyError(f"corrector of order {o} required for {which}")
    c1 = correctors[1]
    p11 = c1.p1
    d0f = f.d_carrier()
    if which == "H1_1":
        return comm(p11, d0f, h_leading)
    if which == "H1_2":
        c2 = correctors[2]
        return (
            comm(c2.p1, d0f, h_leading)
            + comm(p11, d0f, h_first)
            + comm(p11, f.d_slow(0), h_leading)
            + comm(c1.y - c1.z.lmul(quat.I), f.d_slow(1), h_leading)
        )
    return -comm(p11, p11.d_carrier() * d0f, h_leading) + comm2(p11, p11, d0f.d_carrier(), h_leading) * 0.5


def h2_wavenumber_formulas(F: NDArray, A: NDArray, B: NDArray, grid: Grid, k: float, sign: int,
                           bands: int = 3) -> Field:
    """Closed forms of the second-order multiscale terms acting on conj(F) e^{-j phi}
    (sign = -1) or F e^{j phi} (sign = +1)."""
    base = Field.zeros(grid, bands, k, 1.0)
    sc = lambda v, m=0: Field.scalar(base, v, m)
    Fb, Ab = np.conj(F), np.conj(A)
    FX, FY = slow_deriv(F, grid, 1, 0), slow_deriv(F, grid, 0, 1)
    AY = slow_deriv(A, grid, 0, 1)
    FbX, FbY = np.conj(FX), np.conj(FY)
    i_minus_h = lambda g: g - g.hilbert()
    if sign == -1:
        inner = sc(A * FbX) + sc(Ab * FY).rmul(quat.K) * 0.5 - sc(k * B * Fb).rmul(quat.J)
        return sc(-(k**2) * A**2 * Fb, 1) + i_minus_h(inner)
    if sign == 1:
        first = i_minus_h(sc(A * FbY).rmul(quat.K)) * (-0.5)
        second = sc(0.5j * (Ab * FbY - np.conj(AY) * Fb), -2).rmul(quat.I)
        return first + second
    raise ValueError("sign must be +1 or -1")
