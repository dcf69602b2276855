"""Left/right j-Fourier transforms, multiplier operators and norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from . import quat
from .field import Field, Grid, riesz_symbol

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients (na, nb, 4) in numpy FFT order, normalised by 1/(na nb)."""

    coeffs: NDArray
    flavor: str
    grid: Grid

    def centered(self) -> NDArray:
        return np.fft.fftshift(self.coeffs, axes=(0, 1))

    def energy(self) -> float:
        """Frequency-side L2 norm squared, scaled to match the physical integral."""
        return float(np.sum(self.coeffs**2) * self.grid.la * self.grid.lb)


def _check_shape(f: Field):
    if f.bands:
        raise ValueError("transforms act on realized grid fields")


def fft_left(f: Field) -> SpectralField:
    """Coefficients against e^{-j xi.x} placed on the left.

    With f = u + w i (u, w 1,j-valued) this is fft(u) + fft(w) i.
    """
    _check_shape(f)
    n = f.grid.na * f.grid.nb
    uh = np.fft.fft2(f.u[0]) / n
    wh = np.fft.fft2(f.w[0]) / n
    return SpectralField(quat.from_pair(uh, wh), LEFT, f.grid)


def fft_right(f: Field) -> SpectralField:
    """Coefficients with the exponential on the right.

    Writing f = u + i v with u = f0 + j f2, v = f1 + j f3 gives fft(u) + i fft(v).
    """
    _check_shape(f)
    n = f.grid.na * f.grid.nb
    c = f.components()
    uh = np.fft.fft2(c[..., 0] + 1j * c[..., 2]) / n
    vh = np.fft.fft2(c[..., 1] + 1j * c[..., 3]) / n
    return SpectralField(np.stack([uh.real, vh.real, uh.imag, vh.imag], axis=-1), RIGHT, f.grid)


def inverse(s: SpectralField) -> Field:
    n = s.grid.na * s.grid.nb
    c = s.coeffs
    if s.flavor == LEFT:
        uh, wh = quat.to_pair(c)
        return Field(s.grid, np.fft.ifft2(uh) * n, np.fft.ifft2(wh) * n)
    u = np.fft.ifft2(c[..., 0] + 1j * c[..., 2]) * n
    v = np.fft.ifft2(c[..., 1] + 1j * c[..., 3]) * n
    comps = np.stack([u.real, v.real, u.imag, v.imag], axis=-1)
    return Field.from_components(s.grid, comps)


def inner(f: Field, g: Field) -> float:
    """Physical-side integral of the componentwise inner product f . g."""
    return float(np.sum(quat.dot(f.components(), g.components())) * f.grid.cell_area)


# multipliers ----------------------------------------------------------------

@dataclass(frozen=True)
class MultiplierSymbol:
    """Operator sum_r c_r M_r with constant quaternions c_r acting on the left
    and scalar-kernel multipliers M_r given by their symbols."""

    terms: tuple[tuple[tuple[float, float, float, float], Callable], ...]

    @classmethod
    def scalar(cls, sym: Callable) -> "MultiplierSymbol":
        return cls(((tuple(quat.ONE), sym),))


def apply_multiplier(f: Field, m: MultiplierSymbol) -> Field:
    out = None
    for c, sym in m.terms:
        g = f.multiplier(sym)
        if tuple(c) != tuple(quat.ONE):
            g = g.lmul(np.asarray(c))
        out = g if out is None else out + g
    return out


IDENTITY = MultiplierSymbol.scalar(lambda x1, x2: np.ones(np.broadcast(x1, x2).shape))


def riesz(l: int) -> MultiplierSymbol:
    return MultiplierSymbol.scalar(lambda x1, x2: riesz_symbol(l, x1, x2))


HILBERT = MultiplierSymbol(
    (
        (tuple(-quat.J), lambda x1, x2: riesz_symbol(1, x1, x2)),
        (tuple(quat.I), lambda x1, x2: riesz_symbol(2, x1, x2)),
    )
)


def flat_hilbert(f: Field) -> Field:
    return f.hilbert()


def fractional_derivative(f: Field, q: float) -> Field:
    if not (-2.0 < q <= 4.0):
        raise ValueError(f"order q={q} outside (-2, 4]")
    return f.abs_d(q)


def mode_filter(f: Field, k: float) -> Field:
    """Keep left-transform modes with |(xi1 - k, xi2)| <= k/2."""
    if k == 0:
        raise ValueError("mode filter needs a nonzero carrier")
    x1, x2 = f.frequencies()
    keep = np.hypot(x1 - k, x2) <= abs(k) / 2
    return f.mask_left(keep)


# norms ----------------------------------------------------------------------

def l2_norm(f: Field) -> float:
    return f.l2()


def sobolev_norm(f: Field, s: float) -> float:
    return f.sobolev(s)


def japanese_weight(grid: Grid, d: float) -> NDArray:
    """(1 + x^2 + y^2)^{d/2}, with x, y measured periodically from the domain midpoint."""
    a, b = grid.coords
    x = a - grid.la / 2
    y = b - grid.lb / 2
    return (1.0 + x**2 + y**2) ** (d / 2)


def weighted_norm(f: Field, s: int, d: float) -> float:
    if int(s) != s or s < 0:
        raise ValueError("weighted norm needs a non-negative integer s")
    if d < 0:
        raise ValueError("weight exponent must be non-negative")
    wgt = japanese_weight(f.grid, d)
    return Field(f.grid, f.u * wgt, f.w * wgt).sobolev(s)


def holder_norm(f: Field, s: int) -> float:
    """Sum over multi-indices |j| <= s of the grid maximum of the derivative."""
    if int(s) != s or s < 0:
        raise ValueError("holder norm needs a non-negative integer s")
    total = 0.0
    for order in range(s + 1):
        for ja in range(order + 1):
            g = f
            for _ in range(ja):
                g = g.d(0)
            for _ in range(order - ja):
                g = g.d(1)
            total += g.maxabs()
    return total


# serialization --------------------------------------------------------------

def dump_rows(f: Field) -> NDArray:
    """Rows (alpha, beta, q0, q1, q2, q3)."""
    a, b = f.grid.coords
    c = f.components()
    return np.column_stack([a.ravel(), b.ravel(), c.reshape(-1, 4)])


def write_field(f: Field, path, binary: bool = False) -> None:
    rows = dump_rows(f)
    if binary:
        rows.astype("<f8").tofile(path)
    else:
        np.savetxt(path, rows, delimiter=",", fmt="%.17g", header="alpha,beta,q0,q1,q2,q3", comments="")


def read_field(path, grid: Grid, binary: bool = False) -> Field:
    if binary:
        rows = np.fromfile(path, dtype="<f8").reshape(-1, 6)
    else:
        rows = np.loadtxt(path, delimiter=",", skiprows=1)
    return Field.from_components(grid, rows[:, 2:].reshape(grid.na, grid.nb, 4))


def band_limit(f: Field, frac: float = 2.0 / 3.0) -> Field:
    """Zero every mode whose grid index exceeds frac of the Nyquist index."""
    e1, e2 = f.grid.wavenumbers
    c1 = frac * math.pi * f.grid.na / f.grid.la
    c2 = frac * math.pi * f.grid.nb / f.grid.lb
    return f.mask_left((np.abs(e1) < c1) & (np.abs(e2) < c2))


def random_field(grid: Grid, rng: np.random.Generator, frac: float = 0.5) -> Field:
    """Random band-limited quaternion field with zero mean."""
    f = Field.from_components(grid, rng.standard_normal(grid.shape + (4,)))
    f = band_limit(f, frac)
    return Field(f.grid, f.u - f.u.mean(), f.w - f.w.mean())
