"""Order-by-order checks of the packet hierarchy and eps-convergence studies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from . import quat
from .field import Field, Grid, slow_deriv
from .hilbert_expansion import h_leading
from .hnls import PacketParams, hnls_operator, hnls_rhs
from . import residual as rs

__all__ = [
    "ConvergenceStudy", "fit_slope", "dispersion_residual", "group_velocity_residual",
    "epsilon3_forcing", "simplified_forcing", "hnls_closure_residual", "residual_sweep",
    "flat_energy", "minus_h0_part", "half_derivative_energy",
]


def fit_slope(eps: Sequence[float], norms: Sequence[float]) -> float:
    """Least-squares slope of log(norm) against log(eps)."""
    return float(np.polyfit(np.log(eps), np.log(norms), 1)[0])


@dataclass
class ConvergenceStudy:
    eps_list: list[float]
    norms: dict[str, list[float]]
    s: float = 2.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        for key, v in self.norms.items():
            if len(v) != len(self.eps_list):
                raise ValueError(f"series {key!r} does not match eps_list")

    def slope(self, key: str) -> float:
        return fit_slope(self.eps_list, self.norms[key])

    def decreasing(self, key: str) -> bool:
        v = self.norms[key]
        return all(b < a for a, b in zip(v, v[1:]))

    def rows(self) -> list[list[float]]:
        keys = list(self.norms)
        return [[e] + [self.norms[k][i] for k in keys] for i, e in enumerate(self.eps_list)]


# leading orders ----------------------------------------------------------------------

def _band_base(grid: Grid, k: float, bands: int = 1) -> Field:
    return Field.zeros(grid, bands, k, 1.0)


def dispersion_residual(A: NDArray, grid: Grid, p: PacketParams, omega: float | None = None) -> float:
    """L2 norm of (d_t^2 - j d_alpha)(I - H0) Im(A e^{j phi}) k with the envelope frozen.

    Time and space derivatives act on the carrier only; band m carries
    e^{j m (k alpha + omega t)}.
    """
    w = p.omega if omega is None else float(omega)
    base = _band_base(grid, p.k)
    zk = (Field.scalar(base, np.asarray(A, complex), 1)).component(2).rmul(quat.K)
    q = zk - h_leading(zk)
    m = q.band_index()[:, 0, 0]
    qtt = q.band_scale(-((m * w) ** 2))
    out = qtt - q.d_carrier().lmul(quat.J)
    return out.band_scale((m != 0).astype(float)).l2()


def group_velocity_residual(A: NDArray, grid: Grid, p: PacketParams, A_t1: NDArray | None = None) -> float:
    """Norm of 2 j omega (A_t1 - omega' A_X) e^{j phi} i.

    A_t1 = None means A is read in the moving frame, A_t1 = omega' A_X.
    """
    AX = slow_deriv(np.asarray(A, complex), grid, 1)
    At1 = p.omega_prime * AX if A_t1 is None else np.asarray(A_t1, complex)
    base = _band_base(grid, p.k)
    f = Field.scalar(base, 2j * p.omega * (At1 - p.omega_prime * AX), 1).rmul(quat.I)
    return f.l2()


# order eps^3 ---------------------------------------------------------------------------

def _i_minus_h(g: Field) -> Field:
    return g - g.hilbert()


def epsilon3_forcing(A: NDArray, B: NDArray, grid: Grid, p: PacketParams, A_T: NDArray | None = None,
                     M2: NDArray | None = None) -> dict[str, Field]:
    """The nonzero third-order forcing terms, one field each, plus their sum under "total".

    A_T defaults to the envelope equation; M2 to k|A|^2/2.  Slow calculus
    (eps = 1) on carrier bands -1..1.
    """
    A = np.asarray(A, complex)
    B = np.asarray(B, complex)
    k, w, w2 = p.k, p.omega, p.omega_double_prime
    At = hnls_rhs(A, grid, p) if A_T is None else np.asarray(A_T, complex)
    M2 = 0.5 * k * np.abs(A) ** 2 if M2 is None else np.real(M2)
    base = _band_base(grid, k)
    sc = lambda v, m=0: Field.scalar(base, v, m)
    d = lambda a, nx, ny: slow_deriv(a, grid, nx, ny)
    Bb_Y = np.conj(d(B, 0, 1))
    Ab_YY, Ab_XY = np.conj(d(A, 0, 2)), np.conj(d(A, 1, 1))
    A_YY, A_XX = d(A, 0, 2), d(A, 2, 0)
    absD_k = lambda v: sc(v).rmul(quat.K).abs_d()
    cubic = A * np.abs(A) ** 2
    t = {}
    t["I1"] = sc(Bb_Y, -1)
    t["I2"] = sc(Ab_YY, -1).rmul(quat.I) * (-0.5 / k) - sc(Ab_XY, -1).rmul(quat.J) * (1.0 / k)
    t["I3"] = -sc(Bb_Y, -1) - _i_minus_h(absD_k(M2))
    t["I4"] = (
        sc(A_YY, 1).rmul(quat.I) * (-0.5 / k)
        + sc(Ab_YY, -1).rmul(quat.I) * (0.5 / k)
        + sc(Ab_XY, -1).lmul(quat.J) * (1.0 / k)
        + _i_minus_h(absD_k(np.abs(A) ** 2)) * (0.5 * k)
    )
    t["I5"] = sc(w * (2j * At - w2 * A_XX + 2 * k**2 * w * cubic), 1).rmul(quat.I)
    t["I6"] = _i_minus_h(sc(A * np.conj(d(A, 0, 1))).rmul(quat.J)) * (0.5 * k)
    t["I9"] = -_i_minus_h(sc(A * np.conj(d(A, 0, 1))).rmul(quat.J)) * (0.5 * k)
    t["I12"] = sc(cubic, 1).rmul(quat.I) * (-(k**3))
    total = None
    for v in t.values():
        total = v if total is None else total + v
    t["total"] = total
    return t


def simplified_forcing(A: NDArray, grid: Grid, p: PacketParams, A_T: NDArray | None = None,
                       M2: NDArray | None = None) -> Field:
    """(I - H0)(-|D| M2 k + (k/2)|D|(|A|^2 k)) + omega N(A) e^{j phi} i, N the envelope operator."""
    A = np.asarray(A, complex)
    k, w = p.k, p.omega
    At = hnls_rhs(A, grid, p) if A_T is None else np.asarray(A_T, complex)
    M2 = 0.5 * k * np.abs(A) ** 2 if M2 is None else np.real(M2)
    base = _band_base(grid, k)
    sc = lambda v, m=0: Field.scalar(base, v, m)
    slow = _i_minus_h(sc(M2).rmul(quat.K).abs_d() * (-1.0) + sc(np.abs(A) ** 2).rmul(quat.K).abs_d() * (0.5 * k))
    return slow + sc(w * hnls_operator(A, At, grid, p), 1).rmul(quat.I)


def hnls_closure_residual(A: NDArray, A_T: NDArray, grid: Grid, p: PacketParams,
                          M2: NDArray | str = "induced") -> float:
    """Norm of the third-order forcing for a numerically supplied time derivative.

    M2 = "induced" uses the mean term k|A|^2/2; an array overrides it.
    """
    m2 = 0.5 * p.k * np.abs(np.asarray(A)) ** 2 if isinstance(M2, str) and M2 == "induced" else M2
    if isinstance(m2, str):
        raise ValueError(f"unknown M2 choice {M2!r}")
    return simplified_forcing(A, grid, p, A_T, m2).l2()


# residual sweep ------------------------------------------------------------------------

AUX_EPS = (0.02, 0.01)


def residual_sweep(A0: NDArray, grid: Grid, k: float = 1.0, eps_list: Sequence[float] = (0.2, 0.1, 0.05),
                   s: float = 2.0, orders: int = 3, bands: int = 5, ay_sign: float = 1.0,
                   aux_eps: Sequence[float] | None = AUX_EPS) -> ConvergenceStudy:
    """Residual norms of the assembled packet for each eps.

    Series: "L2", "Hs" for the full residual; with aux_eps given, also
    "projected_L2", "projected_Hs" where the leading eps^4 coefficient of the
    band-coefficient residual, estimated by Richardson extrapolation on the
    auxiliary ladder, is removed.
    """
    eps_list = [float(e) for e in eps_list]
    fields = {}
    for e in eps_list + list(aux_eps or ()):
        p = PacketParams(k, e)
        fields[e] = rs.residual_field(A0, grid, p, orders=orders, bands=bands, ay_sign=ay_sign)
    norms = {
        "L2": [fields[e].l2() for e in eps_list],
        "Hs": [fields[e].sobolev(s) for e in eps_list],
    }
    meta = {"k": k, "slow_n": grid.na, "bands": bands, "orders": orders, "s": s}
    if aux_eps:
        ea, eb = aux_eps
        if not eb < ea:
            raise ValueError("aux_eps must be decreasing")
        ra_u, ra_w = fields[ea].u / ea**4, fields[ea].w / ea**4
        rb_u, rb_w = fields[eb].u / eb**4, fields[eb].w / eb**4
        # r(e) = R4 + e R5 + ...  ->  R4 = (ea r(eb) - eb r(ea)) / (ea - eb)
        c4u = (ea * rb_u - eb * ra_u) / (ea - eb)
        c4w = (ea * rb_w - eb * ra_w) / (ea - eb)
        proj = [fields[e]._new(fields[e].u - e**4 * c4u, fields[e].w - e**4 * c4w) for e in eps_list]
        norms["projected_L2"] = [f.l2() for f in proj]
        norms["projected_Hs"] = [f.sobolev(s) for f in proj]
        meta["aux_eps"] = list(aux_eps)
    return ConvergenceStudy(eps_list, norms, s, meta)


# flat energy ----------------------------------------------------------------------------

def minus_h0_part(theta: Field) -> Field:
    """(I - H0) theta / 2 on the nonzero frequencies, which satisfies H0 f = -f."""
    g = theta.multiplier(lambda x1, x2: (np.hypot(x1, x2) > 0).astype(float))
    return (g - g.hilbert()) * 0.5


def half_derivative_energy(theta: Field) -> float:
    """|| |D|^{1/2} theta ||^2."""
    return theta.abs_d(0.5).l2() ** 2


def flat_energy(theta: Field, theta_t: Field) -> float:
    """||theta_t||^2 - integral of theta . (k x grad) theta, with k x grad = j d_alpha - i d_beta."""
    q = theta.d(0).lmul(quat.J) - theta.d(1).lmul(quat.I)
    a = theta.components()
    b = q.components()
    form = -float(np.sum(a * b)) * theta.grid.cell_area
    return theta_t.l2() ** 2 + form
