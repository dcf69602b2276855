"""Quadratic normal-form kernels for the deep-water packet.

A correction Q(theta) is written in frequency space as a convolution of the
mode-filtered packet factor eps B_{-k}(conj(S) e^{-j phi}) against kernels Q0,
Q1 acting on i theta.  With the packet frequency frozen at xi - xi' = -k i the
kernels solve, for d = |xi' - k i| - |xi'| - k,

    d Q0 + 2 j omega |xi'| Q1 = F0
    d Q1 - 2 j omega Q0       = F1

whose determinant is the resonance denominator D = d^2 - 4 k |xi'|.
1,j-valued numbers are complex numbers here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import quat
from .field import Field, Grid
from .hnls import PacketParams
from . import spectral

RESONANCE_TOL = 1e-9


def _norm(x: NDArray) -> NDArray:
    return np.hypot(x[..., 0], x[..., 1])


def resonance_denominator(xi: ArrayLike, xi_prime: ArrayLike) -> NDArray:
    """(|xi| - |xi - xi'| - |xi'|)^2 - 4 |xi'| |xi - xi'|; never positive."""
    xi = np.asarray(xi, float)
    xp = np.asarray(xi_prime, float)
    a, b, c = _norm(xi), _norm(xi - xp), _norm(xp)
    return (a - b - c) ** 2 - 4 * c * b


def comparison_weight(xi: ArrayLike, xi_prime: ArrayLike) -> NDArray:
    """(|xi| + |xi'| + |xi - xi'|) / (|xi| |xi'| |xi - xi'|)."""
    xi = np.asarray(xi, float)
    xp = np.asarray(xi_prime, float)
    a, b, c = _norm(xi), _norm(xi - xp), _norm(xp)
    return (a + b + c) / (a * b * c)


@dataclass
class InequalityReport:
    name: str
    samples: int
    violations: int
    constant: float = float("nan")
    rows: NDArray | None = field(default=None, repr=False)  # (lhs, rhs) per sample

    @property
    def ok(self) -> bool:
        return self.violations == 0


def fit_comparability_constant(xi: NDArray, xi_prime: NDArray) -> float:
    """Smallest C0 with 1/C0 <= w / |D|^{-1}... i.e. both one-sided ratios bounded by C0."""
    ratio = comparison_weight(xi, xi_prime) * np.abs(resonance_denominator(xi, xi_prime))
    return float(max(np.max(ratio), np.max(1.0 / ratio)))


def denominator_inequalities(xi: NDArray, xi_prime: NDArray, c0: float | None = None,
                             rtol: float = 1e-12, prime_factor: float = 1.0) -> list[InequalityReport]:
    """Check the triangle-type bound and the three-term bound.

    The triangle bound reads | |xi| - |xi'| - |xi - xi'| | <= min(2|xi - xi'|, f |xi'|)
    with f = prime_factor.  Only f = 2 holds for all pairs: xi = (-100, 0),
    xi' = (1, 0) gives 2 > 1 when f = 1.
    For the three-term bound the constant is c0 (fitted from the
    comparability bound if not given).
    """
    xi = np.asarray(xi, float)
    xp = np.asarray(xi_prime, float)
    d = xi - xp
    a, b, c = _norm(xi), _norm(d), _norm(xp)
    lhs_b = np.abs(a - c - b)
    rhs_b = np.minimum(2 * b, prime_factor * c)
    viol_b = int(np.sum(lhs_b > rhs_b * (1 + rtol) + rtol))
    rep_b = InequalityReport("triangle", len(a), viol_b, prime_factor, np.stack([lhs_b, rhs_b], -1))

    if c0 is None:
        c0 = fit_comparability_constant(xi, xp)
    D = resonance_denominator(xi, xp)
    wedge = lambda p, q: p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    lhs_c = np.abs(wedge(xi, xp) / D)
    rhs_c = c0 * (
        np.abs(wedge(xi, xp)) / (a * c) + np.abs(wedge(xi, d)) / (a * b) + np.abs(wedge(xp, d)) / (c * b)
    )
    viol_c = int(np.sum(lhs_c > rhs_c * (1 + rtol) + rtol))
    rep_c = InequalityReport("three-term", len(a), viol_c, c0, np.stack([lhs_c, rhs_c], -1))
    return [rep_b, rep_c]


def sample_frequencies(rng: np.random.Generator, n: int, scale: float = 10.0) -> tuple[NDArray, NDArray]:
    """Random (xi, xi') pairs with log-uniform magnitudes, away from the degenerate set."""
    def draw():
        r = scale * 10.0 ** rng.uniform(-2, 2, n)
        t = rng.uniform(0, 2 * np.pi, n)
        return np.stack([r * np.cos(t), r * np.sin(t)], -1)

    xi, xp = draw(), draw()
    return xi, xp


# kernels ------------------------------------------------------------------------

Variant = Literal["generic", "particular1", "particular7"]


class ResonanceError(ValueError):
    pass


@dataclass(frozen=True)
class NormalFormKernel:
    k: float
    variant: Variant = "particular1"
    l: int = 1
    F0: Callable[[NDArray], NDArray] | None = None
    F1: Callable[[NDArray], NDArray] | None = None
    cutoff: float = 4.0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.variant not in ("generic", "particular1", "particular7"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "generic" and (self.F0 is None or self.F1 is None):
            raise ValueError("the generic kernel needs F0 and F1")
        if self.variant == "particular7" and self.l not in (1, 2):
            raise ValueError("l must be 1 or 2")

    @property
    def omega(self) -> float:
        return float(np.sqrt(self.k))

    def d(self, xp: NDArray) -> NDArray:
        shifted = xp - np.array([self.k, 0.0])
        return _norm(shifted) - _norm(xp) - self.k

    def denominator(self, xp: NDArray) -> NDArray:
        return self.d(xp) ** 2 - 4 * self.k * _norm(xp)

    def forcing(self, xp: NDArray) -> tuple[NDArray, NDArray]:
        xp = np.asarray(xp, float)
        if self.variant == "generic":
            return np.asarray(self.F0(xp), complex), np.asarray(self.F1(xp), complex)
        f0 = -self.k * xp[..., 1] + 0j
        if self.variant == "particular7":
            xi = xp - np.array([self.k, 0.0])
            gain = xp[..., self.l - 1] / _norm(xp) - xi[..., self.l - 1] / _norm(xi)
            f0 = -1j * f0 * gain   # j k xi2' times the gain factor
        return f0, np.zeros_like(f0)

    def values(self, xp: NDArray) -> tuple[NDArray, NDArray]:
        """(Q0, Q1) without admissibility checks."""
        F0, F1 = self.forcing(xp)
        return solve_system(self.d(xp), self.denominator(xp), self.omega, _norm(xp), F0, F1)

    def admissible(self, xp: NDArray) -> NDArray:
        xp = np.asarray(xp, float)
        ok = np.abs(self.denominator(xp)) >= RESONANCE_TOL * (1 + _norm(xp) ** 2)
        if self.variant == "particular7":
            ok &= _norm(xp) >= self.cutoff * self.k
        return ok


def solve_system(d: NDArray, D: NDArray, omega: float, r: NDArray, F0: NDArray, F1: NDArray):
    """Exact inverse of the 2x2 kernel system."""
    q0 = (d * F0 - 2j * omega * r * F1) / D
    q1 = (2j * omega * F0 + d * F1) / D
    return q0, q1


def system_residual(K: NormalFormKernel, xp: NDArray, q0: NDArray, q1: NDArray) -> NDArray:
    """max over the two equations of |lhs - F| at each xi'."""
    d, r = K.d(xp), _norm(xp)
    F0, F1 = K.forcing(xp)
    e0 = d * q0 + 2j * K.omega * r * q1 - F0
    e1 = d * q1 - 2j * K.omega * q0 - F1
    return np.maximum(np.abs(e0), np.abs(e1))


def kernel_values(K: NormalFormKernel, xi_prime: ArrayLike) -> tuple[NDArray, NDArray]:
    xp = np.asarray(xi_prime, float)
    bad = ~K.admissible(xp)
    if np.any(bad):
        where = np.atleast_2d(xp)[np.atleast_1d(bad)]
        kind = "below the low-frequency cutoff or resonant" if K.variant == "particular7" else "resonant"
        raise ResonanceError(f"{kind} frequencies: {where[:5].tolist()}")
    return K.values(xp)


def derivative_gain_check(k: float, rng: np.random.Generator, samples: int = 100_000,
                          C: float | None = None) -> InequalityReport:
    """|xi'_l/|xi'| - xi_l/|xi|| <= C/|xi'| for |xi - xi'| <= 3k/2, |xi'| >= 4k (both l)."""
    C = 6 * k if C is None else C
    r = 4 * k * 10.0 ** rng.uniform(0, 3, samples)
    t = rng.uniform(0, 2 * np.pi, samples)
    xp = np.stack([r * np.cos(t), r * np.sin(t)], -1)
    rho = 1.5 * k * np.sqrt(rng.uniform(0, 1, samples))
    s = rng.uniform(0, 2 * np.pi, samples)
    xi = xp + np.stack([rho * np.cos(s), rho * np.sin(s)], -1)
    u = xp / _norm(xp)[:, None] - xi / _norm(xi)[:, None]
    lhs = np.max(np.abs(u), axis=1) * _norm(xp)
    fitted = float(np.max(lhs))
    return InequalityReport("derivative-gain", samples, int(np.sum(lhs > C)), fitted,
                            np.stack([lhs, np.full_like(lhs, C)], -1))


# bilinear application -----------------------------------------------------------------

def resonant_free(theta: Field, K: NormalFormKernel) -> Field:
    """Drop the modes of theta at xi' and -xi' wherever the kernel is resonant
    (and the Nyquist rows).  Both signs are needed because left-multiplying by
    a vector unit mixes the two pair entries through conjugation."""
    e1, e2 = theta.grid.wavenumbers
    xp = np.stack(np.broadcast_arrays(e1, e2), -1)
    tol = lambda x: RESONANCE_TOL * (1 + _norm(x) ** 2)
    keep = (np.abs(K.denominator(xp)) >= tol(xp)) & (np.abs(K.denominator(-xp)) >= tol(xp))
    return theta.mask_left(keep * theta.grid.nyquist_free)


def packet_factor(S: NDArray, slow: Grid, p: PacketParams, n_fast: int) -> Field:
    """eps B_{-k}(conj(S) e^{-j k alpha}) on the fast grid."""
    base = Field.zeros(slow, 1, p.k, p.eps)
    f = Field.scalar(base, np.conj(np.asarray(S, complex)), -1).realize(n_fast)
    return spectral.mode_filter(f, -p.k) * p.eps


def _coeffs_left(f: Field) -> tuple[NDArray, NDArray]:
    n = f.grid.na * f.grid.nb
    return np.fft.fft2(f.u[0]) / n, np.fft.fft2(f.w[0]) / n


def _from_left(grid: Grid, U: NDArray, W: NDArray) -> Field:
    n = grid.na * grid.nb
    return Field(grid, np.fft.ifft2(U * n), np.fft.ifft2(W * n))


def _flip(a: NDArray) -> NDArray:
    """a(-xi) on the FFT index lattice."""
    return np.roll(a[::-1, ::-1], 1, axis=(0, 1))


def _kernel_grid(grid: Grid, K: NormalFormKernel, which: int, weights: NDArray) -> NDArray:
    """Kernel values at every grid frequency; zero off the admissible set.

    Resonant modes carrying nonzero weight raise.
    """
    e1, e2 = grid.wavenumbers
    xp = np.stack(np.broadcast_arrays(e1, e2), -1)
    ok = K.admissible(xp)
    live = np.abs(weights) > 1e-13 * max(1.0, float(np.max(np.abs(weights))))
    if K.variant != "particular7":
        clash = live & ~ok
        if np.any(clash):
            idx = np.argwhere(clash)[:5]
            bad = [(float(e1[i, 0]), float(e2[0, j])) for i, j in idx]
            raise ResonanceError(f"resonant modes inside the support: {bad}")
    q = np.zeros(grid.shape, complex)
    q0, q1 = K.values(xp[ok])
    q[ok] = q0 if which == 0 else q1
    return q


def _support(P: NDArray, tol: float = 1e-14) -> NDArray:
    return np.argwhere(np.abs(P) > tol * max(1.0, float(np.max(np.abs(P)))))


def convolve_left(pf: Field, theta: Field, K: NormalFormKernel, which: int = 0) -> Field:
    """Field whose left transform is sum_xi' P^(xi - xi') Q(xi') F^L[theta](xi').

    pf is 1,j-valued; the sum runs directly over the support of P^.
    """
    P, _ = _coeffs_left(pf)
    U, W = _coeffs_left(theta)
    q = _kernel_grid(theta.grid, K, which, np.abs(U) + np.abs(W))
    qU, qW = q * U, q * W
    outU = np.zeros_like(U)
    outW = np.zeros_like(W)
    for i, j in _support(P):
        c = P[i, j]
        outU += c * np.roll(qU, (i, j), axis=(0, 1))
        outW += c * np.roll(qW, (i, j), axis=(0, 1))
    return _from_left(theta.grid, outU, outW)


def convolve_right(theta: Field, pf: Field, K: NormalFormKernel, which: int = 0) -> Field:
    """Field whose right transform is sum_xi' F^R[theta](xi') Q(xi') P^(xi - xi')."""
    P, _ = _coeffs_left(pf)
    U, W = _coeffs_left(theta)
    Wr = _flip(W)                       # right coefficients of theta: (U, W(-xi))
    q = _kernel_grid(theta.grid, K, which, np.abs(U) + np.abs(Wr))
    outU = np.zeros_like(U)
    outWr = np.zeros_like(U)
    for i, j in _support(P):
        c = P[i, j]
        cq = q * c
        # (a + b i) c = a c + b conj(c) i
        outU += np.roll(U * cq, (i, j), axis=(0, 1))
        outWr += np.roll(Wr * np.conj(cq), (i, j), axis=(0, 1))
    return _from_left(theta.grid, outU, _flip(outWr))


def apply_bilinear(S: NDArray, slow: Grid, theta: Field, K: NormalFormKernel, p: PacketParams,
                   theta_t: Field | None = None) -> Field:
    """Quadratic correction with kernels Q0 on i theta and Q1 on i theta_t."""
    n = theta.grid.na
    pf = packet_factor(S, slow, p, n)
    out = convolve_left(pf, theta.lmul(quat.I), K, 0)
    if theta_t is not None:
        out = out + convolve_left(pf, theta_t.lmul(quat.I), K, 1)
    return out


@dataclass(frozen=True)
class ReflectedKernel:
    """xi' -> conj(Q(-xi')), the kernel of the conjugation relation

        convolve_right(theta, p, K) = conj(convolve_left(conj p, conj theta, reflected K)).
    """

    base: NormalFormKernel

    @property
    def variant(self):
        return self.base.variant

    def admissible(self, xp):
        return self.base.admissible(-np.asarray(xp))

    def values(self, xp):
        q0, q1 = self.base.values(-np.asarray(xp))
        return np.conj(q0), np.conj(q1)
