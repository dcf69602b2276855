"""Split-step solvers for the envelope equations.

The envelope A obeys the hyperbolic cubic NLS

    j A_T + a A_XX - b A_YY + c A |A|^2 = 0,

solved in complex arithmetic (j identified with the complex unit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .field import Field, Grid
from . import spectral


@dataclass(frozen=True)
class PacketParams:
    k: float = 1.0
    eps: float = 0.1

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("carrier wavenumber must be positive")
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0, 1)")

    @property
    def omega(self) -> float:
        return float(np.sqrt(self.k))

    @property
    def omega_prime(self) -> float:
        return 0.5 / np.sqrt(self.k)

    @property
    def omega_double_prime(self) -> float:
        return -0.25 * self.k**-1.5


def hnls_coefficients(p: PacketParams) -> tuple[float, float, float]:
    """(a, b, c), all positive."""
    w2 = p.omega_double_prime
    return -w2 / 2, -w2, p.k**2 * p.omega / 2


@dataclass(frozen=True)
class Envelope:
    """1,j-valued slow field, stored as a complex array."""

    values: NDArray
    grid: Grid
    T: float = 0.0

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("envelope array does not match its grid")

    def field(self) -> Field:
        return Field(self.grid, self.values)


class _Spectral:
    def __init__(self, grid: Grid):
        self.grid = grid
        self.e1, self.e2 = grid.wavenumbers
        ca = (2 / 3) * np.pi * grid.na / grid.la
        cb = (2 / 3) * np.pi * grid.nb / grid.lb
        self.dealias = (np.abs(self.e1) < ca) & (np.abs(self.e2) < cb)

    def dx(self, a: NDArray, n: int = 1) -> NDArray:
        return np.fft.ifft2((1j * self.e1) ** n * self.grid.nyquist_free * np.fft.fft2(a))

    def dy(self, a: NDArray, n: int = 1) -> NDArray:
        return np.fft.ifft2((1j * self.e2) ** n * self.grid.nyquist_free * np.fft.fft2(a))


def hnls_rhs(A: NDArray, grid: Grid, p: PacketParams) -> NDArray:
    """A_T = j (a A_XX - b A_YY + c |A|^2 A)."""
    a, b, c = hnls_coefficients(p)
    sp = _Spectral(grid)
    return 1j * (a * sp.dx(A, 2) - b * sp.dy(A, 2) + c * np.abs(A) ** 2 * A)


def hnls_rhs_dt(A: NDArray, At: NDArray, grid: Grid, p: PacketParams) -> NDArray:
    """Time derivative of hnls_rhs along a solution with A_T = At."""
    a, b, c = hnls_coefficients(p)
    sp = _Spectral(grid)
    cub = 2 * np.real(np.conj(A) * At) * A + np.abs(A) ** 2 * At
    return 1j * (a * sp.dx(At, 2) - b * sp.dy(At, 2) + c * cub)


def linear_symbol(grid: Grid, p: PacketParams) -> NDArray:
    """L with A_T = L A for the linear part, in Fourier space."""
    a, b, _ = hnls_coefficients(p)
    e1, e2 = grid.wavenumbers
    return -1j * (a * e1**2 - b * e2**2)


def _check(arr: NDArray):
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError("non-finite values in envelope")


def evolve_A(A0: Envelope, p: PacketParams, T_final: float, dt: float, linear_only: bool = False) -> Envelope:
    """Strang splitting: half linear step, exact cubic phase rotation, half linear step."""
    if dt == 0 or not np.isfinite(dt):
        raise ValueError("dt must be a nonzero finite number")
    steps = int(round(abs(T_final - A0.T) / abs(dt)))
    if steps and abs(steps * abs(dt) - abs(T_final - A0.T)) > 1e-9 * max(1.0, abs(T_final)):
        raise ValueError("T_final - T0 must be a multiple of dt")
    h = np.sign(T_final - A0.T) * abs(dt) if steps else 0.0
    sp = _Spectral(A0.grid)
    _, _, c = hnls_coefficients(p)
    half = np.exp(linear_symbol(A0.grid, p) * h / 2)
    ah = np.fft.fft2(A0.values)
    for _ in range(steps):
        ah = ah * half
        if not linear_only:
            a = np.fft.ifft2(ah)
            a = a * np.exp(1j * c * np.abs(a) ** 2 * h)
            ah = np.fft.fft2(a) * sp.dealias
        ah = ah * half
    out = np.fft.ifft2(ah)
    _check(out)
    return Envelope(out, A0.grid, A0.T + steps * h)


Source = Callable[[float], NDArray]


def evolve_B(
    B0: Envelope,
    p: PacketParams,
    T_final: float,
    dt: float,
    F1: Source | None = None,
    F2: Source | None = None,
    F3: Source | None = None,
) -> Envelope:
    """B_T = j B_XX - j B_YY + F1 B + F2 conj(B) + F3.

    F1, F2, F3 are callbacks of slow time returning slow arrays (they
    typically close over an envelope path A).  The linear part and the
    source F3 (sampled at the step midpoint) are integrated exactly by an
    exponential integrator; the coupling terms F1, F2 are Strang-split
    around it with a midpoint Runge-Kutta substep.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = B0.grid
    steps = int(round((T_final - B0.T) / dt))
    e1, e2 = grid.wavenumbers
    L = 1j * (e2**2 - e1**2)
    eL = np.exp(L * dt)
    with np.errstate(invalid="ignore", divide="ignore"):
        phi1 = np.where(np.abs(L) > 0, (eL - 1) / np.where(np.abs(L) > 0, L, 1.0), dt)
    zero = lambda T: 0.0
    F1 = F1 or zero
    F2 = F2 or zero
    F3 = F3 or zero

    def couple(B, T, h):
        def g(b, t):
            return F1(t) * b + F2(t) * np.conj(b)

        mid = B + 0.5 * h * g(B, T)
        return B + h * g(mid, T + 0.5 * h)

    B = np.asarray(B0.values, dtype=complex)
    T = B0.T
    coupled = F1 is not zero or F2 is not zero
    for _ in range(steps):
        if coupled:
            B = couple(B, T, dt / 2)
        src = np.fft.fft2(np.broadcast_to(F3(T + dt / 2), grid.shape))
        B = np.fft.ifft2(eL * np.fft.fft2(B) + phi1 * src)
        if coupled:
            B = couple(B, T + dt / 2, dt / 2)
        T += dt
    _check(B)
    return Envelope(B, grid, T)


# diagnostics ----------------------------------------------------------------

def mass(A: Envelope) -> float:
    return float(np.sum(np.abs(A.values) ** 2) * A.grid.cell_area)


def hamiltonian(A: Envelope, p: PacketParams) -> float:
    a, b, c = hnls_coefficients(p)
    sp = _Spectral(A.grid)
    ax = sp.dx(A.values)
    ay = sp.dy(A.values)
    dens = a * np.abs(ax) ** 2 - b * np.abs(ay) ** 2 - 0.5 * c * np.abs(A.values) ** 4
    return float(np.sum(dens) * A.grid.cell_area)


def decay_norm(A: Envelope, delta: float) -> float:
    if not (0 <= delta <= 1):
        raise ValueError("delta must lie in [0, 1]")
    return spectral.weighted_norm(A.field(), 3, delta)


def hnls_defect(path: Sequence[Envelope], p: PacketParams) -> tuple[NDArray, float]:
    """Central-difference time derivative at the middle snapshot of three and the
    L2 norm of 2j A_T - w'' A_XX + 2 w'' A_YY + k^2 w A|A|^2 there."""
    a0, a1, a2 = path
    h = a2.T - a1.T
    At = (a2.values - a0.values) / (2 * h)
    return At, float(np.sqrt(np.sum(np.abs(hnls_operator(a1.values, At, a1.grid, p)) ** 2) * a1.grid.cell_area))


def hnls_operator(A: NDArray, At: NDArray, grid: Grid, p: PacketParams) -> NDArray:
    """2j A_T - w'' A_XX + 2 w'' A_YY + k^2 w A |A|^2."""
    sp = _Spectral(grid)
    w2 = p.omega_double_prime
    return 2j * At - w2 * sp.dx(A, 2) + 2 * w2 * sp.dy(A, 2) + p.k**2 * p.omega * A * np.abs(A) ** 2


def gaussian(grid: Grid, amp: complex = 1.0, width: float = 1.0, kx: float = 0.0, center=None) -> NDArray:
    a, b = grid.coords
    ca, cb = center if center is not None else (grid.la / 2, grid.lb / 2)
    r2 = (a - ca) ** 2 + (b - cb) ** 2
    return amp * np.exp(-r2 / (2 * width**2)) * np.exp(1j * kx * (a - ca))
