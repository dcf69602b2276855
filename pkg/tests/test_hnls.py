import numpy as np
import pytest

from deepwave import hnls
from deepwave.field import Grid
from deepwave.hnls import Envelope, PacketParams


@pytest.mark.parametrize(
    "k, expected",
    [(1.0, (1 / 8, 1 / 4, 1 / 2)), (4.0, (1 / 64, 1 / 32, 16.0))],
)
def test_coefficients(k, expected):
    assert hnls.hnls_coefficients(PacketParams(k, 0.1)) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("k", [0.25, 1.0, 4.0, 9.0])
def test_coefficients_positive(k):
    p = PacketParams(k, 0.1)
    assert all(c > 0 for c in hnls.hnls_coefficients(p))
    assert p.omega**2 == pytest.approx(k)


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_dispersion_derivatives_by_differences(k):
    h = 1e-4
    w = lambda x: PacketParams(x, 0.1).omega
    p = PacketParams(k, 0.1)
    assert p.omega_prime == pytest.approx((w(k + h) - w(k - h)) / (2 * h), rel=1e-7)
    assert p.omega_double_prime == pytest.approx((w(k + h) - 2 * w(k) + w(k - h)) / h**2, rel=1e-5)


@pytest.mark.parametrize("k, eps", [(0.0, 0.1), (1.0, 0.0), (1.0, 1.0)])
def test_bad_params(k, eps):
    with pytest.raises(ValueError):
        PacketParams(k, eps)


def test_zero_data_stays_zero(small_grid):
    A = Envelope(np.zeros(small_grid.shape, complex), small_grid)
    out = hnls.evolve_A(A, PacketParams(), 0.1, 0.01)
    assert np.all(out.values == 0)


@pytest.mark.parametrize("m", [(1, 0), (0, 2), (3, -1)])
def test_linear_mode_exact_phase(small_grid, m):
    p = PacketParams()
    a, b, _ = hnls.hnls_coefficients(p)
    X, Y = small_grid.coords
    kx, ky = (2 * np.pi / small_grid.la) * np.array(m)
    A0 = np.exp(1j * (kx * X + ky * Y))
    out = hnls.evolve_A(Envelope(A0, small_grid), p, 0.5, 0.05, linear_only=True)
    exact = A0 * np.exp(-1j * (a * kx**2 - b * ky**2) * 0.5)
    np.testing.assert_allclose(out.values, exact, atol=1e-10)


def test_plane_wave_nonlinear_phase(small_grid):
    # A = a0 e^{j kappa X} solves the full equation with a constant frequency shift
    p = PacketParams()
    a, _, c = hnls.hnls_coefficients(p)
    X, _ = small_grid.coords
    kap, a0, T = 2 * np.pi / small_grid.la, 0.6, 0.4
    A0 = a0 * np.exp(1j * kap * X)
    out = hnls.evolve_A(Envelope(A0, small_grid), p, T, 0.01)
    exact = A0 * np.exp(1j * (c * a0**2 - a * kap**2) * T)
    np.testing.assert_allclose(out.values, exact, atol=1e-10)


def test_backward_evolution_returns(slow_grid):
    small_grid = slow_grid   # 32 points would put the dealiasing cutoff inside the spectrum
    p = PacketParams()
    A0 = Envelope(hnls.gaussian(small_grid, 0.8, 1.5), small_grid)
    fwd = hnls.evolve_A(A0, p, 0.2, 0.01)
    back = hnls.evolve_A(fwd, p, 0.0, 0.01)
    np.testing.assert_allclose(back.values, A0.values, atol=1e-6)


def test_dt_must_divide_interval(small_grid):
    A0 = Envelope(hnls.gaussian(small_grid), small_grid)
    with pytest.raises(ValueError):
        hnls.evolve_A(A0, PacketParams(), 0.105, 0.01)


def test_non_finite_input_raises(small_grid):
    vals = np.zeros(small_grid.shape, complex)
    vals[0, 0] = np.nan
    with pytest.raises(FloatingPointError):
        hnls.evolve_A(Envelope(vals, small_grid), PacketParams(), 0.01, 0.01)


def test_conservation(slow_grid, envelope):
    p = PacketParams()
    A0 = Envelope(envelope, slow_grid)
    A1 = hnls.evolve_A(A0, p, 0.5, 1e-3)
    assert abs(hnls.mass(A1) / hnls.mass(A0) - 1) <= 1e-8
    h0 = hnls.hamiltonian(A0, p)
    assert abs(hnls.hamiltonian(A1, p) / h0 - 1) <= 1e-6


def test_strang_order(slow_grid):
    small_grid = slow_grid   # 32 points would put the dealiasing cutoff inside the spectrum
    p = PacketParams()
    A0 = Envelope(hnls.gaussian(small_grid, 1.0, 1.5), small_grid)
    T = 0.5
    ref = hnls.evolve_A(A0, p, T, 1e-3 / 16).values
    dts = (4e-3, 2e-3, 1e-3)
    err = [np.linalg.norm(hnls.evolve_A(A0, p, T, dt).values - ref) for dt in dts]
    order = np.polyfit(np.log(dts), np.log(err), 1)[0]
    assert 1.8 <= order <= 2.2


def test_defect_is_small_and_decreasing(slow_grid):
    small_grid = slow_grid   # 32 points would put the dealiasing cutoff inside the spectrum
    p = PacketParams()
    A0 = Envelope(hnls.gaussian(small_grid, 1.0, 1.5), small_grid)
    defects = []
    for dt in (2e-3, 1e-3):
        a0 = hnls.evolve_A(A0, p, 0.1 - dt, dt)
        a1 = hnls.evolve_A(a0, p, 0.1, dt)
        a2 = hnls.evolve_A(a1, p, 0.1 + dt, dt)
        defects.append(hnls.hnls_defect([a0, a1, a2], p)[1])
    # splitting error shrinks with dt down to a floor set by the spatial truncation
    assert defects[1] < defects[0] < 1e-4


def test_operator_vanishes_on_exact_rhs(small_grid):
    p = PacketParams()
    A = hnls.gaussian(small_grid, 0.7, 1.5, kx=0.3)
    assert np.abs(hnls.hnls_operator(A, hnls.hnls_rhs(A, small_grid, p), small_grid, p)).max() < 1e-12


def test_rhs_time_derivative_by_differences(small_grid):
    p = PacketParams()
    A = hnls.gaussian(small_grid, 0.7, 1.5, kx=0.3)
    At = hnls.hnls_rhs(A, small_grid, p)
    h = 1e-5
    fd = (hnls.hnls_rhs(A + h * At, small_grid, p) - hnls.hnls_rhs(A - h * At, small_grid, p)) / (2 * h)
    np.testing.assert_allclose(hnls.hnls_rhs_dt(A, At, small_grid, p), fd, atol=1e-7)


def test_evolve_B_zero(small_grid):
    B0 = Envelope(np.zeros(small_grid.shape, complex), small_grid)
    assert np.all(hnls.evolve_B(B0, PacketParams(), 0.5, 0.01).values == 0)


def test_evolve_B_matches_duhamel_quadrature(small_grid):
    X, Y = small_grid.coords
    kap = 2 * 2 * np.pi / small_grid.la
    src = (0.3 - 0.2j) * np.exp(1j * kap * X)
    T = 0.7
    B = hnls.evolve_B(Envelope(np.zeros(small_grid.shape, complex), small_grid), PacketParams(), T, 0.01,
                      F3=lambda t: src)
    # B(T) = int_0^T exp((T - s) L) F3 ds with L = -j kap^2 on this mode
    nodes, weights = np.polynomial.legendre.leggauss(30)
    s = 0.5 * T * (nodes + 1)
    integral = 0.5 * T * np.sum(weights * np.exp(-1j * kap**2 * (T - s)))
    np.testing.assert_allclose(B.values, src * integral, atol=1e-8)


def test_evolve_B_growth_bound(small_grid, rng):
    p = PacketParams()
    B0 = Envelope(hnls.gaussian(small_grid, 0.5, 2.0), small_grid)
    c1 = 0.3 * rng.normal(size=small_grid.shape)
    c2 = 0.2 * rng.normal(size=small_grid.shape) * 1j
    c3 = 0.1 * hnls.gaussian(small_grid, 1.0, 1.0)
    T = 0.5
    B = hnls.evolve_B(B0, p, T, 1e-3, F1=lambda t: 1j * c1, F2=lambda t: c2, F3=lambda t: c3)
    # Gronwall: ||B(T)|| <= (||B0|| + T ||F3||) exp(T sup|F2|) since F1 = j c1 is a pure rotation
    l2 = lambda a: np.sqrt(np.sum(np.abs(a) ** 2) * small_grid.cell_area)
    bound = (l2(B0.values) + T * l2(c3)) * np.exp(T * np.abs(c2).max())
    assert l2(B.values) <= bound


def test_mass_and_hamiltonian_of_zero(small_grid):
    A = Envelope(np.zeros(small_grid.shape, complex), small_grid)
    assert hnls.mass(A) == 0 and hnls.hamiltonian(A, PacketParams()) == 0


def test_decay_norm_against_refined_grid(slow_grid, envelope):
    coarse = hnls.decay_norm(Envelope(envelope, slow_grid), 0.5)
    fine_grid = Grid.square(128, slow_grid.la)
    fine = hnls.decay_norm(Envelope(hnls.gaussian(fine_grid, 1.0, 1.5), fine_grid), 0.5)
    assert np.isfinite(coarse)
    assert coarse == pytest.approx(fine, rel=0.05)


@pytest.mark.parametrize("delta", [-0.1, 1.5])
def test_decay_norm_rejects_delta(slow_grid, envelope, delta):
    with pytest.raises(ValueError):
        hnls.decay_norm(Envelope(envelope, slow_grid), delta)
