"""Approximate deep-water wave packets built from slow envelopes.

Everything is assembled in carrier-band form: a field is stored as slow
coefficients of e^{j m k alpha}, so products and the flat Hilbert transform are
exact at every eps.  ``Field.realize`` evaluates a result on the fast grid.

The builders are written against the ``Field`` interface only, which lets the
same code run on time jets (see ``jet``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from . import quat
from .field import Field, Grid
from .hnls import PacketParams

DEFAULT_BANDS = 4


# carrier-band inputs ---------------------------------------------------------------

def base_field(grid: Grid, p: PacketParams, bands: int = DEFAULT_BANDS) -> Field:
    return Field.zeros(grid, bands, p.k, p.eps)


def check_commensurate(grid: Grid, p: PacketParams, tol: float = 1e-9) -> None:
    """The carrier must be a frequency of the fast grid alpha = X / eps."""
    for length in (grid.la,):
        cycles = p.k * length / (2 * np.pi * p.eps)
        if abs(cycles - round(cycles)) > tol:
            raise ValueError(
                f"carrier k={p.k} is not periodic on the fast grid (k L / (2 pi eps) = {cycles:.6g})"
            )


def frame_shift(A: NDArray, grid: Grid, shift: float) -> NDArray:
    """A(X + shift, Y), by a spectral phase shift."""
    e1, _ = grid.wavenumbers
    return np.fft.ifft2(np.exp(1j * e1 * shift) * np.fft.fft2(A))


@dataclass
class Inputs:
    """Envelopes and carrier as band fields at one instant."""

    A: Field
    B: Field
    E: Field
    p: PacketParams
    M3: Field | None = None


def packet_inputs(A: NDArray, B: NDArray | None, grid: Grid, p: PacketParams, t: float = 0.0,
                  bands: int = DEFAULT_BANDS, M3: NDArray | None = None) -> Inputs:
    """Band-field inputs at fast time t.

    A and B are the envelopes at slow time T = eps^2 t; they are read in the
    moving frame X = eps (alpha + omega' t) and the carrier carries e^{j omega t}.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape != grid.shape:
        raise ValueError("envelope does not match the slow grid")
    B = np.zeros_like(A) if B is None else np.asarray(B, dtype=complex)
    if B.shape != grid.shape:
        raise ValueError("envelope does not match the slow grid")
    base = base_field(grid, p, bands)
    shift = p.eps * p.omega_prime * t
    if shift:
        A, B = frame_shift(A, grid, shift), frame_shift(B, grid, shift)
    E = Field.scalar(base, np.full(grid.shape, np.exp(1j * p.omega * t)), 1)
    m3 = None if M3 is None else Field.scalar(base, np.real(M3))
    return Inputs(Field.scalar(base, A), Field.scalar(base, B), E, p, m3)


# closed forms (generic over Field and Jet) ------------------------------------------

def lambda1_of(A, E):
    return (A * E).lmul(quat.I)


def z1_of(A, E):
    return (A * E).component(2)


def z2_of(A, B, E, k):
    return (B * E).component(2) + (A * A.conjugate()) * (0.5 * k)


def lambda2_of(A, B, E, k, ay_sign: float = 1.0):
    ay = (A.d_slow(1) * E).component(2).lmul(quat.J) * (ay_sign / k)
    return (B * E).lmul(quat.I) + (A * A.conjugate()).rmul(quat.K) * (0.5 * k) + ay


def _i_minus_h(g):
    return g - g.hilbert()


def _minus_k_part(g):
    """g - {g}_3 k."""
    return g - g.component(3).rmul(quat.K)


def lambda3_of(A, B, E, k, M3=None):
    Ab, Bb = A.conjugate(), B.conjugate()
    AY = A.d_slow(1)
    AE = A * E
    # (I - H0) H0 = -(I - H0); this sign makes the scalar part cancel
    mixed = _i_minus_h((A * Bb).rmul(quat.K)) * (0.5 * k)
    X = (AE * Ab * A).rmul(quat.I) * (-0.5 * k**2) + _i_minus_h(
        (A * Ab.d_slow(0)).rmul(quat.I) * 0.5
        + (A * Ab.d_slow(1) + Ab * AY).rmul(quat.J) * 0.25
        + (B * Ab).rmul(quat.K) * (0.5 * k)
    )
    out = (
        (B.d_slow(1) * E).component(2).lmul(quat.J) * (1.0 / k)
        + _minus_k_part(mixed)
        + (A.d_slow(1, 2) * E).component(0).rmul(quat.I) * (0.5 / k**2)
        - (A.d_slow(0).d_slow(1) * E).lmul(quat.J).component(2).rmul(quat.J) * (1.0 / k**2)
        + _minus_k_part(X)
    )
    if M3 is not None:
        mk = M3.rmul(quat.K)
        out = out + mk + mk.hilbert()
    return out


def b2_of(A, k, omega):
    return (A * A.conjugate()).lmul(quat.I) * (-k * omega)


# public builders --------------------------------------------------------------------

def build_lambda1(A: NDArray, grid: Grid, p: PacketParams, t: float = 0.0,
                  bands: int = DEFAULT_BANDS) -> Field:
    """i A e^{j phi}, phi = k alpha + omega t."""
    check_commensurate(grid, p)
    s = packet_inputs(A, None, grid, p, t, bands)
    return lambda1_of(s.A, s.E)


def build_order2(A: NDArray, B: NDArray | None, grid: Grid, p: PacketParams, t: float = 0.0,
                 bands: int = DEFAULT_BANDS, ay_sign: float = 1.0) -> tuple[Field, Field]:
    """Second-order height and surface corrector (z2, lambda2)."""
    check_commensurate(grid, p)
    s = packet_inputs(A, B, grid, p, t, bands)
    return z2_of(s.A, s.B, s.E, p.k), lambda2_of(s.A, s.B, s.E, p.k, ay_sign)


def build_lambda3(A: NDArray, B: NDArray | None, grid: Grid, p: PacketParams, t: float = 0.0,
                  bands: int = DEFAULT_BANDS, M3: NDArray | None = None,
                  scalar_tol: float | None = 1e-9) -> Field:
    """Third-order surface corrector.

    The scalar part of the closed form cancels identically; with ``scalar_tol``
    set, a leftover larger than tol times the size of the output raises.
    """
    check_commensurate(grid, p)
    s = packet_inputs(A, B, grid, p, t, bands, M3)
    lam = lambda3_of(s.A, s.B, s.E, p.k, s.M3)
    if scalar_tol is not None:
        sc = lam.component(0)
        scale = max(1.0, float(np.max(np.abs(lam.u)) + np.max(np.abs(lam.w))))
        if np.max(np.abs(sc.u)) > scalar_tol * scale:
            raise ArithmeticError("third-order corrector has a scalar part")
    return lam


def build_b_tilde(A: NDArray, grid: Grid, p: PacketParams, t: float = 0.0, bands: int = DEFAULT_BANDS,
                  b3: Callable[[Inputs], Field] | None = None) -> Field:
    """eps^2 (-k omega |A|^2 i) plus an optional eps^3 hook."""
    s = packet_inputs(A, None, grid, p, t, bands)
    out = b2_of(s.A, p.k, p.omega) * p.eps**2
    if b3 is not None:
        out = out + b3(s) * p.eps**3
    return out


def build_A_tilde(grid: Grid, p: PacketParams, bands: int = DEFAULT_BANDS,
                  a3: Callable[[PacketParams], NDArray] | None = None) -> NDArray:
    """Slow-grid values of the pressure factor: 1 + eps^3 a3."""
    out = np.ones(grid.shape)
    if a3 is not None:
        out = out + p.eps**3 * np.asarray(a3(p), dtype=float)
    return out


@dataclass
class ApproximateSolution:
    lambda_orders: list[Field]
    z_orders: list[Field]
    b_tilde: Field
    A_tilde: NDArray
    params: PacketParams
    t: float = 0.0

    def lam(self, upto: int = 3) -> Field:
        out = self.lambda_orders[0] * self.params.eps
        for j in range(1, upto):
            out = out + self.lambda_orders[j] * self.params.eps ** (j + 1)
        return out

    def z(self, upto: int = 3) -> Field:
        out = self.z_orders[0] * self.params.eps
        for j in range(1, upto):
            out = out + self.z_orders[j] * self.params.eps ** (j + 1)
        return out

    def snapshot(self, n_fast: int) -> dict[str, Field]:
        """Fast-grid realizations of lambda, b and (as a scalar field) A."""
        lam = self.lam().realize(n_fast)
        b = self.b_tilde.realize(n_fast)
        a = Field(lam.grid, np.ones(lam.grid.shape, dtype=complex))
        return {"lambda": lam, "b": b, "A": a}


def build_solution(A: NDArray, B: NDArray | None, grid: Grid, p: PacketParams, t: float = 0.0,
                   bands: int = DEFAULT_BANDS, ay_sign: float = 1.0,
                   M3: NDArray | None = None) -> ApproximateSolution:
    check_commensurate(grid, p)
    s = packet_inputs(A, B, grid, p, t, bands, M3)
    k = p.k
    l3 = lambda3_of(s.A, s.B, s.E, k, s.M3)
    z3 = l3.component(3)
    return ApproximateSolution(
        lambda_orders=[lambda1_of(s.A, s.E), lambda2_of(s.A, s.B, s.E, k, ay_sign), l3],
        z_orders=[z1_of(s.A, s.E), z2_of(s.A, s.B, s.E, k), z3],
        b_tilde=b2_of(s.A, k, p.omega) * p.eps**2,
        A_tilde=build_A_tilde(grid, p),
        params=p,
        t=t,
    )


# order / phase bookkeeping ----------------------------------------------------------

_ORDER = {"A": 1, "Abar": 1, "dX": 1, "dY": 1, "B": 2, "Bbar": 2, "dT": 2, "R1": 0, "R2": 0}
_PHASE = {"A": 1, "B": 1, "Abar": -1, "Bbar": -1, "dX": 0, "dY": 0, "dT": 0, "R1": 0, "R2": 0}
GENERATORS = tuple(_ORDER)


@dataclass(frozen=True)
class TermSignature:
    factors: tuple[str, ...]

    def __post_init__(self):
        bad = [f for f in self.factors if f not in _ORDER]
        if bad:
            raise ValueError(f"unknown generator(s): {bad}")

    def __mul__(self, other: "TermSignature") -> "TermSignature":
        return TermSignature(self.factors + other.factors)


def term_order(t: TermSignature) -> int:
    return sum(_ORDER[f] for f in t.factors)


def term_phase(t: TermSignature) -> int:
    return sum(_PHASE[f] for f in t.factors)


@dataclass(frozen=True)
class TermEntry:
    name: str
    signature: TermSignature
    eps_power: int
    phase: int


def _sig(*f: str) -> TermSignature:
    return TermSignature(tuple(f))


# every implemented corrector term, with the eps power and carrier multiple it is built with
REGISTRY: tuple[TermEntry, ...] = (
    TermEntry("lambda1: i A e^{j phi}", _sig("A"), 1, 1),
    TermEntry("z2: Im(B e^{j phi})", _sig("B"), 2, 1),
    TermEntry("z2: k|A|^2/2", _sig("A", "Abar"), 2, 0),
    TermEntry("lambda2: i B e^{j phi}", _sig("B"), 2, 1),
    TermEntry("lambda2: k|A|^2 k/2", _sig("A", "Abar"), 2, 0),
    TermEntry("lambda2: (j/k) Im(A_Y e^{j phi})", _sig("dY", "A"), 2, 1),
    TermEntry("b2: -k omega |A|^2 i", _sig("A", "Abar"), 2, 0),
    TermEntry("lambda3: (j/k) Im(B_Y e^{j phi})", _sig("dY", "B"), 3, 1),
    TermEntry("lambda3: (I-H0) k A Bbar k/2", _sig("A", "Bbar"), 3, 0),
    TermEntry("lambda3: Re(A_YY e^{j phi}) i / 2k^2", _sig("dY", "dY", "A"), 3, 1),
    TermEntry("lambda3: Im(j A_XY e^{j phi}) j / k^2", _sig("dX", "dY", "A"), 3, 1),
    TermEntry("lambda3: -k^2 A|A|^2 e^{j phi} i / 2", _sig("A", "A", "Abar"), 3, 1),
    TermEntry("lambda3: (I-H0) A Abar_X i / 2", _sig("A", "dX", "Abar"), 3, 0),
    TermEntry("lambda3: (I-H0) (A Abar_Y + Abar A_Y) j / 4", _sig("A", "dY", "Abar"), 3, 0),
    TermEntry("lambda3: (I-H0) k B Abar k / 2", _sig("B", "Abar"), 3, 0),
)


@dataclass
class LedgerReport:
    checked: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def table(self) -> str:
        lines = [f"checked {self.checked} terms, {len(self.violations)} violation(s)"]
        lines += [f"  VIOLATION {v}" for v in self.violations]
        return "\n".join(lines)


def ledger_check(entries: Iterable[TermEntry] = REGISTRY,
                 registered: Sequence[str] | None = None) -> LedgerReport:
    """Compare each term's eps power and carrier multiple with its signature.

    With ``registered`` given, every entry name must appear in it.
    """
    entries = list(entries)
    if registered is not None:
        known = set(registered)
        missing = [e.name for e in entries if e.name not in known]
        if missing:
            raise KeyError(f"unregistered term(s): {missing}")
    rep = LedgerReport(len(entries))
    for e in entries:
        o, ph = term_order(e.signature), term_phase(e.signature)
        if o != e.eps_power:
            rep.violations.append(f"{e.name}: eps power {e.eps_power}, order {o}")
        if ph != e.phase:
            rep.violations.append(f"{e.name}: carrier multiple {e.phase}, phase {ph}")
    return rep
