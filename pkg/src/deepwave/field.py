"""Periodic grids and quaternion-valued fields.

A field is stored as a pair of 1,j-valued (complex) arrays with f = u + w i.
Fields may also carry a carrier decomposition

    u(alpha, beta) = sum_m U_m(eps alpha, eps beta) e^{j m k alpha}

and likewise for w, with the slow coefficients U_m sampled on a slow grid.
A plain grid field is the special case of a single band, k = 0 and eps = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numbers

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import quat

Symbol = Callable[[NDArray, NDArray], NDArray]


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, la) x [0, lb)."""

    na: int
    nb: int
    la: float = 2 * np.pi
    lb: float = 2 * np.pi

    def __post_init__(self):
        if not (_is_pow2(self.na) and _is_pow2(self.nb)):
            raise ValueError(f"grid sizes must be powers of two, got {self.na}x{self.nb}")
        if self.la <= 0 or self.lb <= 0:
            raise ValueError("domain lengths must be positive")

    @classmethod
    def square(cls, n: int, length: float = 2 * np.pi) -> "Grid":
        return cls(n, n, length, length)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.na, self.nb)

    @property
    def cell_area(self) -> float:
        return self.la * self.lb / (self.na * self.nb)

    @cached_property
    def coords(self) -> tuple[NDArray, NDArray]:
        a = np.arange(self.na) * (self.la / self.na)
        b = np.arange(self.nb) * (self.lb / self.nb)
        return np.meshgrid(a, b, indexing="ij")

    @cached_property
    def wavenumbers(self) -> tuple[NDArray, NDArray]:
        e1 = 2 * np.pi * np.fft.fftfreq(self.na, d=self.la / self.na)
        e2 = 2 * np.pi * np.fft.fftfreq(self.nb, d=self.lb / self.nb)
        return np.meshgrid(e1, e2, indexing="ij")

    @cached_property
    def nyquist_free(self) -> NDArray:
        keep = np.ones(self.shape)
        keep[self.na // 2, :] = 0.0
        keep[:, self.nb // 2] = 0.0
        return keep

    def is_frequency(self, k: float, axis: int = 0, tol: float = 1e-9) -> bool:
        length = self.la if axis == 0 else self.lb
        x = k * length / (2 * np.pi)
        return abs(x - round(x)) < tol

    def refine(self, n_fast: int, eps: float) -> "Grid":
        """Fast grid whose points map onto this grid through X = eps alpha."""
        return Grid(n_fast, n_fast, self.la / eps, self.lb / eps)


def band_conj(a: NDArray) -> NDArray:
    """Complex conjugate of a band-decomposed field: band m takes conj of band -m."""
    return np.conj(a[::-1])


def band_conv(a: NDArray, b: NDArray) -> NDArray:
    """Pointwise product of two band-decomposed complex fields, truncated to the same bands."""
    nb = a.shape[0]
    m = (nb - 1) // 2
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for j in range(nb):
        lo, hi = max(0, j - m), min(nb - 1, j + m)
        out[lo : hi + 1] += a[j] * b[lo - j + m : hi - j + m + 1]
    return out


def _fft(a: NDArray) -> NDArray:
    return np.fft.fft2(a, axes=(-2, -1))


def _ifft(a: NDArray) -> NDArray:
    return np.fft.ifft2(a, axes=(-2, -1))


def resample(a: NDArray, n: int) -> NDArray:
    """Trigonometric interpolation of a periodic array (last two axes) onto n x n points."""
    na, nb = a.shape[-2:]
    if n < na or n < nb:
        raise ValueError("resampling only refines")
    spec = _fft(a)
    out = np.zeros(a.shape[:-2] + (n, n), dtype=complex)
    ha, hb = na // 2, nb // 2
    ia = np.r_[0:ha, n - ha : n]
    ib = np.r_[0:hb, n - hb : n]
    out[..., ia[:, None], ib[None, :]] = spec
    # split the Nyquist rows evenly so real data stays real
    out[..., ha, :] = out[..., n - ha, :] = 0.5 * out[..., n - ha, :]
    out[..., :, hb] = out[..., :, n - hb] = 0.5 * out[..., :, n - hb]
    return _ifft(out) * (n * n / (na * nb))


class Field:
    """Quaternion field f = u + w i, optionally split into carrier bands."""

    __slots__ = ("grid", "u", "w", "k", "eps")

    def __init__(self, grid: Grid, u: ArrayLike, w: ArrayLike | None = None, k: float = 0.0, eps: float = 1.0):
        u = np.asarray(u, dtype=complex)
        if u.ndim == 2:
            u = u[None]
        w = np.zeros_like(u) if w is None else np.asarray(w, dtype=complex)
        if w.ndim == 2:
            w = w[None]
        if u.shape != w.shape or u.shape[1:] != grid.shape or u.shape[0] % 2 == 0:
            raise ValueError(f"array shape {u.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.u = u
        self.w = w
        self.k = float(k)
        self.eps = float(eps)
        self.u.flags.writeable = False
        self.w.flags.writeable = False

    # construction -------------------------------------------------------
    @classmethod
    def from_components(cls, grid: Grid, comps: ArrayLike) -> "Field":
        """From an array of shape (na, nb, 4)."""
        u, w = quat.to_pair(comps)
        return cls(grid, u, w)

    @classmethod
    def zeros(cls, grid: Grid, bands: int = 0, k: float = 0.0, eps: float = 1.0) -> "Field":
        z = np.zeros((2 * bands + 1,) + grid.shape, dtype=complex)
        return cls(grid, z, z.copy(), k, eps)

    @classmethod
    def constant(cls, like: "Field", q: ArrayLike) -> "Field":
        cu, cw = quat.to_pair(q)
        u = np.zeros_like(like.u)
        w = np.zeros_like(like.w)
        u[like.bands] = cu
        w[like.bands] = cw
        return like._new(u, w)

    @classmethod
    def scalar(cls, like: "Field", values: ArrayLike, band: int = 0) -> "Field":
        """1,j-valued slow array placed on one carrier band."""
        u = np.zeros_like(like.u)
        u[like.bands + band] = values
        return like._new(u, np.zeros_like(u))

    def _new(self, u: NDArray, w: NDArray) -> "Field":
        return Field(self.grid, u, w, self.k, self.eps)

    def _check(self, other: "Field"):
        if (
            other.grid != self.grid
            or other.u.shape != self.u.shape
            or other.k != self.k
            or other.eps != self.eps
        ):
            raise ValueError("fields live on different grids or band layouts")

    @property
    def bands(self) -> int:
        return (self.u.shape[0] - 1) // 2

    def with_bands(self, m: int) -> "Field":
        """Pad or truncate the carrier decomposition to bands -m..m."""
        cur = self.bands
        u = np.zeros((2 * m + 1,) + self.grid.shape, dtype=complex)
        w = np.zeros_like(u)
        r = min(m, cur)
        u[m - r : m + r + 1] = self.u[cur - r : cur + r + 1]
        w[m - r : m + r + 1] = self.w[cur - r : cur + r + 1]
        return self._new(u, w)

    # algebra ------------------------------------------------------------
    def __add__(self, other: "Field") -> "Field":
        if not isinstance(other, Field):
            return NotImplemented
        self._check(other)
        return self._new(self.u + other.u, self.w + other.w)

    def __sub__(self, other: "Field") -> "Field":
        if not isinstance(other, Field):
            return NotImplemented
        self._check(other)
        return self._new(self.u - other.u, self.w - other.w)

    def __neg__(self) -> "Field":
        return self._new(-self.u, -self.w)

    def __mul__(self, other):
        if isinstance(other, Field):
            return self.qmul(other)
        if not isinstance(other, (numbers.Number, np.ndarray)):
            return NotImplemented
        return self._new(self.u * other, self.w * other) if np.isrealobj(other) else self.rscale(other)

    def __rmul__(self, c):
        return self._new(self.u * c, self.w * c) if np.isrealobj(c) else self.lscale(c)

    def lscale(self, c) -> "Field":
        """Left multiplication by a 1,j-valued number or slow array."""
        return self._new(c * self.u, c * self.w)

    def rscale(self, c) -> "Field":
        """Right multiplication by a 1,j-valued number: (u + w i) c = u c + w conj(c) i."""
        return self._new(self.u * c, self.w * np.conj(c))

    def qmul(self, other: "Field") -> "Field":
        self._check(other)
        if self.bands == 0:
            u1, w1, u2, w2 = self.u[0], self.w[0], other.u[0], other.w[0]
            return self._new((u1 * u2 - w1 * np.conj(w2))[None], (u1 * w2 + w1 * np.conj(u2))[None])
        u = band_conv(self.u, other.u) - band_conv(self.w, band_conj(other.w))
        w = band_conv(self.u, other.w) + band_conv(self.w, band_conj(other.u))
        return self._new(u, w)

    def lmul(self, q: ArrayLike) -> "Field":
        """Left multiplication by a constant quaternion."""
        cu, cw = quat.to_pair(q)
        return self._new(cu * self.u - cw * band_conj(self.w), cu * self.w + cw * band_conj(self.u))

    def rmul(self, q: ArrayLike) -> "Field":
        """Right multiplication by a constant quaternion."""
        cu, cw = quat.to_pair(q)
        return self._new(self.u * cu - self.w * np.conj(cw), self.u * cw + self.w * np.conj(cu))

    def conjugate(self) -> "Field":
        return self._new(band_conj(self.u), -self.w)

    def dagger(self) -> "Field":
        return self.lmul(quat.K).rmul(quat.K)

    def component(self, idx: int) -> "Field":
        """Real component q_idx as a scalar field."""
        if idx == 0:
            v = 0.5 * (self.u + band_conj(self.u))
        elif idx == 2:
            v = -0.5j * (self.u - band_conj(self.u))
        elif idx == 1:
            v = 0.5 * (self.w + band_conj(self.w))
        elif idx == 3:
            v = 0.5j * (self.w - band_conj(self.w))
        else:
            raise ValueError("component index must be 0..3")
        return self._new(v, np.zeros_like(v))

    def scalar_part(self) -> "Field":
        return self.component(0)

    def vector_part(self) -> "Field":
        return self - self.component(0)

    # spectral operators ------------------------------------------------
    def frequencies(self) -> tuple[NDArray, NDArray]:
        """Physical frequencies (xi1, xi2) of every stored mode, shape (bands, na, nb)."""
        e1, e2 = self.grid.wavenumbers
        m = np.arange(-self.bands, self.bands + 1)[:, None, None]
        return m * self.k + self.eps * e1[None], np.broadcast_to(self.eps * e2[None], self.u.shape)

    def multiplier(self, sym: Symbol) -> "Field":
        """Apply a scalar-kernel Fourier multiplier to every real component.

        Nyquist rows of the storage grid are dropped, since an odd symbol
        cannot act on them without mixing real components.
        """
        s = sym(*self.frequencies())
        if not np.all(np.isfinite(s)):
            raise ValueError("multiplier symbol is not finite on the grid")
        s = s * self.grid.nyquist_free
        return self._new(_ifft(s * _fft(self.u)), _ifft(s * _fft(self.w)))

    def mask_left(self, keep: NDArray) -> "Field":
        """Keep selected modes of the left transform (u and w coefficients)."""
        return self._new(_ifft(keep * _fft(self.u)), _ifft(keep * _fft(self.w)))

    def band_index(self) -> NDArray:
        return np.arange(-self.bands, self.bands + 1)[:, None, None]

    def slow_multiplier(self, sym: Symbol) -> "Field":
        """Multiplier acting on the slow coefficients only (slow frequencies eta)."""
        e1, e2 = self.grid.wavenumbers
        s = sym(e1, e2)[None] * self.grid.nyquist_free
        return self._new(_ifft(s * _fft(self.u)), _ifft(s * _fft(self.w)))

    def d_slow(self, axis: int, n: int = 1) -> "Field":
        """n-th derivative in the slow variable X (axis 0) or Y (axis 1)."""
        return self.slow_multiplier(lambda e1, e2: (1j * (e1 if axis == 0 else e2)) ** n)

    def d_carrier(self) -> "Field":
        """Derivative of the carrier phases only: band m times j m k."""
        s = 1j * self.k * self.band_index()
        return self._new(s * self.u, s * self.w)

    def band_scale(self, factors: NDArray) -> "Field":
        """Multiply band m by factors[m + bands] (real or 1,j-valued)."""
        f = np.asarray(factors)[:, None, None]
        return self._new(f * self.u, f * self.w)

    def band(self, m: int) -> "Field":
        keep = np.zeros(2 * self.bands + 1)
        keep[m + self.bands] = 1.0
        return self.band_scale(keep)

    def d(self, axis: int) -> "Field":
        """Partial derivative in alpha (axis 0) or beta (axis 1)."""
        return self.multiplier(lambda x1, x2: 1j * (x1 if axis == 0 else x2))

    def riesz(self, l: int) -> "Field":
        return self.multiplier(lambda x1, x2: riesz_symbol(l, x1, x2))

    def abs_d(self, q: float = 1.0) -> "Field":
        return self.multiplier(lambda x1, x2: abs_symbol(q, x1, x2))

    def hilbert(self) -> "Field":
        """Flat Hilbert transform -j R1 + i R2."""
        r1, r2 = self.riesz(1), self.riesz(2)
        return self._new(
            -1j * r1.u - band_conj(r2.w),
            -1j * r1.w + band_conj(r2.u),
        )

    def dirac(self) -> "Field":
        """i d_alpha + j d_beta."""
        return self.d(0).lmul(quat.I) + self.d(1).lmul(quat.J)

    # norms -------------------------------------------------------------
    def l2(self) -> float:
        tot = np.sum(np.abs(self.u) ** 2) + np.sum(np.abs(self.w) ** 2)
        return float(np.sqrt(tot * self.grid.cell_area / self.eps**2))

    def sobolev(self, s: float) -> float:
        if s < 0:
            raise ValueError("s must be non-negative")
        return float(np.hypot(self.l2(), self.abs_d(s).l2()))

    def maxabs(self) -> float:
        if self.bands:
            raise ValueError("max norm needs a realized field")
        return float(np.max(np.sqrt(np.abs(self.u[0]) ** 2 + np.abs(self.w[0]) ** 2)))

    # realization -------------------------------------------------------
    def components(self) -> NDArray:
        """(na, nb, 4) real array; carrier fields must be realized first."""
        if self.bands:
            raise ValueError("realize a carrier-band field before reading components")
        return quat.from_pair(self.u[0], self.w[0])

    def realize(self, n_fast: int) -> "Field":
        """Evaluate the band sum on the fast grid alpha = X / eps."""
        fast = self.grid.refine(n_fast, self.eps)
        if self.bands and not fast.is_frequency(self.k):
            raise ValueError("carrier is not a frequency of the fast grid")
        alpha = fast.coords[0]
        u = np.zeros(fast.shape, dtype=complex)
        w = np.zeros(fast.shape, dtype=complex)
        for i, m in enumerate(range(-self.bands, self.bands + 1)):
            ph = np.exp(1j * m * self.k * alpha)
            u += resample(self.u[i], n_fast) * ph
            w += resample(self.w[i], n_fast) * ph
        return Field(fast, u, w)

    def allclose(self, other: "Field", atol: float) -> bool:
        return bool(np.max(np.abs(self.u - other.u)) <= atol and np.max(np.abs(self.w - other.w)) <= atol)


def _absxi(x1: NDArray, x2: NDArray) -> NDArray:
    return np.hypot(x1, x2)


def riesz_symbol(l: int, x1: NDArray, x2: NDArray) -> NDArray:
    r = _absxi(x1, x2)
    x = x1 if l == 1 else x2
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(r > 0, -1j * x / np.where(r > 0, r, 1.0), 0.0)


def abs_symbol(q: float, x1: NDArray, x2: NDArray) -> NDArray:
    r = _absxi(x1, x2)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(r > 0, np.where(r > 0, r, 1.0) ** q, 0.0)


def slow_deriv(a: NDArray, grid: Grid, nx: int = 0, ny: int = 0) -> NDArray:
    """Spectral derivative d_X^nx d_Y^ny of a periodic complex array."""
    e1, e2 = grid.wavenumbers
    s = (1j * e1) ** nx * (1j * e2) ** ny * grid.nyquist_free
    return np.fft.ifft2(s * np.fft.fft2(a))
