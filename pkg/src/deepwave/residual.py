"""Residual of the approximate packet in the full cubic evolution equation.

Given an envelope A at one instant, the packet lambda (orders 1..3), its
height z and the transport b are assembled as carrier-band time jets.  The
residual

    R = P (I - H) z k  -  [D_t, H] (D_t zeta)^dagger  +  J1  +  J2

is then evaluated with exact flat multipliers, where H = H0 + H1[lambda] +
H2[lambda] and J1, J2 are the two boundary integrals, kept to cubic order
(their kernels are frozen at the flat surface).  Cubic-order kernels reduce to
Riesz-type multipliers, because every difference quotient is paired with
enough differences to make the integral absolutely convergent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import quat
from .field import Field, Grid, slow_deriv
from .hilbert_expansion import SurfaceSlices, h1_full, h2_bilinear
from .hnls import PacketParams, hnls_rhs, hnls_rhs_dt
from .jet import Jet, multilinear
from . import wavepacket as wp

UNITS = (quat.I, quat.J, quat.K)


# jets of the inputs -----------------------------------------------------------------

def envelope_jet(A: NDArray, grid: Grid, p: PacketParams, base: Field) -> Jet:
    """(A, dA/dt, d2A/dt2) at t = 0 along the moving frame, using the envelope equation."""
    e, w1 = p.eps, p.omega_prime
    At = hnls_rhs(A, grid, p)
    Att = hnls_rhs_dt(A, At, grid, p)
    d1 = e * w1 * slow_deriv(A, grid, 1) + e**2 * At
    d2 = (e * w1) ** 2 * slow_deriv(A, grid, 2) + 2 * e**3 * w1 * slow_deriv(At, grid, 1) + e**4 * Att
    return Jet([Field.scalar(base, v) for v in (A, d1, d2)])


def carrier_jet(p: PacketParams, base: Field) -> Jet:
    one = np.ones(base.grid.shape)
    w = p.omega
    return Jet([Field.scalar(base, c * one, 1) for c in (1.0, 1j * w, -(w**2))])


# Hilbert transform of the perturbed plane ----------------------------------------------

def _h1(lam: Field, g: Field) -> Field:
    return h1_full(g, SurfaceSlices.from_lambda(lam))


def _h2(a: Field, b: Field, g: Field) -> Field:
    return h2_bilinear(g, SurfaceSlices.from_lambda(a), SurfaceSlices.from_lambda(b))


def h_tilde(lam: Field, g: Field) -> Field:
    return g.hilbert() + _h1(lam, g) + _h2(lam, lam, g)


def h_tilde_jet(lam: Jet, g: Jet) -> Jet:
    return g.hilbert() + multilinear(_h1, lam, g) + multilinear(_h2, lam, lam, g)


def h_tilde_dt(lam: Field, lam_t: Field, g: Field) -> Field:
    """(d/dt H) g for lambda moving with velocity lam_t."""
    return _h1(lam_t, g) + _h2(lam_t, lam, g) + _h2(lam, lam_t, g)


# boundary integrals ----------------------------------------------------------------

def _const(like: Field, q) -> Field:
    return Field.constant(like, q)


def _vec_parts(v: Field) -> list[Field]:
    return [v.component(i) for i in (1, 2, 3)]


def _cross_const(a, b) -> NDArray:
    return quat.cross(np.asarray(a, float), np.asarray(b, float))


def _odd_kernel(l: int, g: Field) -> Field:
    """g -> integral of K_l(P' - P) g(P') dP'."""
    return g.riesz(l)


def _even_kernel(l: int, m: int, g: Field) -> Field:
    """g -> integral of d_m K_l (P' - P) g(P') dP' on the flat plane."""
    if l == 3 and m == 3:
        return g.abs_d()
    if l == 3 or m == 3:
        return g * 0.0

    def sym(x1, x2):
        x = (x1, x2)
        r = np.hypot(x1, x2)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(r > 0, -x[l - 1] * x[m - 1] / np.where(r > 0, r, 1.0), 0.0)

    return g.multiplier(sym)


def boundary_term_one(v: Field, z: Field) -> Field:
    """Integral of K(P' - P) (v - v') x (dbeta' v' dalpha' - dalpha' v' dbeta') z' k."""
    zk = z.rmul(quat.K)
    pairs = ((v.d(1), zk.d(0), 1.0), (v.d(0), zk.d(1), -1.0))
    vs = _vec_parts(v)
    out = v * 0.0
    for a, h, sgn in pairs:
        aparts = _vec_parts(a)
        cross_ah = None
        for i, ei in enumerate(UNITS):
            for j, ej in enumerate(UNITS):
                t = (aparts[j] * h).lmul(_cross_const(ei, ej))
                cross_ah = t * vs[i] if cross_ah is None else cross_ah + t * vs[i]
        vxa_h = None
        for i, ei in enumerate(UNITS):
            for j, ej in enumerate(UNITS):
                t = (vs[i] * aparts[j] * h).lmul(_cross_const(ei, ej))
                vxa_h = t if vxa_h is None else vxa_h + t
        for l in (1, 2):
            el = UNITS[l - 1]
            piece = None
            for i, ei in enumerate(UNITS):
                acc = None
                for j, ej in enumerate(UNITS):
                    t = _odd_kernel(l, aparts[j] * h).lmul(_cross_const(ei, ej))
                    acc = t if acc is None else acc + t
                piece = acc * vs[i] if piece is None else piece + acc * vs[i]
            piece = piece - _odd_kernel(l, vxa_h)
            out = out + piece.lmul(el) * sgn
    return out


def boundary_term_two(u: Field, v: Field, z: Field) -> Field:
    """Integral of [grad K(P' - P) . (u' - u)] (v - v') x (j dalpha' - i dbeta') z' k."""
    zk = z.rmul(quat.K)
    ha, hb = zk.d(0), zk.d(1)
    us, vs = _vec_parts(u), _vec_parts(v)
    # g_i = (e_i x j) h_alpha - (e_i x i) h_beta
    g = [ha.lmul(_cross_const(ei, quat.J)) - hb.lmul(_cross_const(ei, quat.I)) for ei in UNITS]
    out = v * 0.0
    for l in (1, 2, 3):
        el = UNITS[l - 1]
        for m in (1, 2, 3):
            if (l == 3) != (m == 3):
                continue
            um = us[m - 1]
            acc = None
            for i in range(3):
                vi, gi = vs[i], g[i]
                t = (
                    _even_kernel(l, m, um * gi) * vi
                    - _even_kernel(l, m, um * vi * gi)
                    - _even_kernel(l, m, gi) * (um * vi)
                    + _even_kernel(l, m, vi * gi) * um
                )
                acc = t if acc is None else acc + t
            out = out + acc.lmul(el)
    return out


# assembly -----------------------------------------------------------------------------

@dataclass
class ResidualParts:
    lhs: Field
    commutator: Field
    j1: Field
    j2: Field

    @property
    def total(self) -> Field:
        return self.lhs - self.commutator + self.j1 + self.j2


def packet_jets(A: NDArray, grid: Grid, p: PacketParams, orders: int = 3, bands: int = 5,
                ay_sign: float = 1.0) -> tuple[Jet, Jet, Field]:
    """Jets of lambda and b1 (the i-coefficient of b) at t = 0."""
    if orders not in (1, 2, 3):
        raise ValueError("orders must be 1, 2 or 3")
    base = wp.base_field(grid, p, bands)
    Aj = envelope_jet(A, grid, p, base)
    E = carrier_jet(p, base)
    Bj = Jet.steady(base)
    e, k = p.eps, p.k
    lam = wp.lambda1_of(Aj, E) * e
    if orders >= 2:
        lam = lam + wp.lambda2_of(Aj, Bj, E, k, ay_sign) * e**2
    if orders >= 3:
        lam = lam + wp.lambda3_of(Aj, Bj, E, k) * e**3
    if orders >= 2:
        b1 = (Aj * Aj.conjugate()) * (-k * p.omega * e**2)
    else:
        b1 = Jet.steady(base)
    return lam, b1, base


def residual_parts(A: NDArray, grid: Grid, p: PacketParams, orders: int = 3, bands: int = 5,
                   ay_sign: float = 1.0, dagger_k: bool = False, integrals: bool = True) -> ResidualParts:
    wp.check_commensurate(grid, p)
    lam, b1, base = packet_jets(A, grid, p, orders, bands, ay_sign)
    z = lam.component(3)
    zk = z.rmul(quat.K)
    Q = zk - h_tilde_jet(lam, zk)
    Qa = Q.d(0)
    b = b1[0]
    V1 = Q[2] + b1[1] * Qa[0] + b * Qa[1]
    Dt2Q = V1 + b * (Q[1] + b * Qa[0]).d(0)
    l0 = lam[0]
    one_i, one_j = _const(base, quat.I), _const(base, quat.J)
    spatial = (one_j + l0.d(1)) * Qa[0] - (one_i + l0.d(0)) * Q[0].d(1)
    lhs = Dt2Q - spatial

    v = lam[1] + b * (one_i + l0.d(0))
    g = v.dagger()
    if dagger_k:
        g = g.rmul(quat.K)
    comm = h_tilde_dt(l0, lam[1], g) + b * h_tilde(l0, g).d(0) - h_tilde(l0, b * g.d(0))

    zero = base * 0.0
    j1 = boundary_term_one(v, z[0]) if integrals else zero
    j2 = boundary_term_two(v, v, z[0]) if integrals else zero
    return ResidualParts(lhs, comm, j1, j2)


def residual_field(A: NDArray, grid: Grid, p: PacketParams, **kw) -> Field:
    return residual_parts(A, grid, p, **kw).total
