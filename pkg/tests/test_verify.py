import numpy as np
import pytest

from deepwave import quat
from deepwave.field import Field, slow_deriv
from deepwave.hilbert_expansion import h_leading
from deepwave.hnls import PacketParams, gaussian, hnls_rhs
from deepwave.verify import (
    ConvergenceStudy, dispersion_residual, epsilon3_forcing, fit_slope, flat_energy,
    group_velocity_residual, half_derivative_energy, hnls_closure_residual, minus_h0_part,
    simplified_forcing,
)


def _plain_norm(a, grid):
    return float(np.sqrt(grid.cell_area * np.sum(np.abs(a) ** 2)))


@pytest.fixture
def modulated(slow_grid):
    return gaussian(slow_grid, 0.8 * np.exp(0.4j), 1.5, kx=0.25)


# fits and bookkeeping -----------------------------------------------------------------

@pytest.mark.parametrize("power", [1.0, 2.0, 3.5])
def test_fit_slope_of_a_power_law(power):
    eps = [0.2, 0.1, 0.05, 0.025]
    assert fit_slope(eps, [7.0 * e**power for e in eps]) == pytest.approx(power)


def test_study_validates_its_inputs():
    with pytest.raises(ValueError, match="decreasing"):
        ConvergenceStudy([0.1, 0.2], {"a": [1.0, 2.0]})
    with pytest.raises(ValueError, match="does not match"):
        ConvergenceStudy([0.2, 0.1], {"a": [1.0]})


def test_study_slope_rows_and_monotonicity():
    s = ConvergenceStudy([0.2, 0.1, 0.05], {"a": [8.0, 1.0, 0.125], "b": [1.0, 1.0, 2.0]})
    assert s.slope("a") == pytest.approx(3.0)
    assert s.decreasing("a") and not s.decreasing("b")
    assert s.rows()[1] == [0.1, 1.0, 1.0]


# leading orders --------------------------------------------------------------------------

def test_dispersion_holds_on_the_relation(slow_grid, modulated):
    assert dispersion_residual(modulated, slow_grid, PacketParams(1.0, 0.1)) <= 1e-12


@pytest.mark.parametrize("k,omega", [(2.0, 1.0), (1.0, 0.5), (0.5, 1.2)])
def test_dispersion_defect_off_the_relation(slow_grid, k, omega):
    A = np.ones(slow_grid.shape, complex)
    base = Field.zeros(slow_grid, 1, k, 1.0)
    zk = Field.scalar(base, A, 1).component(2).rmul(quat.K)
    q = zk - h_leading(zk)
    want = abs(k - omega**2) * q.l2()
    got = dispersion_residual(A, slow_grid, PacketParams(k, 0.1), omega)
    assert got == pytest.approx(want, rel=1e-12)
    if (k, omega) == (2.0, 1.0):
        assert got == pytest.approx(20.106, abs=1e-3)


def test_group_velocity_in_the_moving_frame(slow_grid, modulated):
    assert group_velocity_residual(modulated, slow_grid, PacketParams(1.0, 0.1)) <= 1e-13


def test_group_velocity_in_a_static_frame(slow_grid, modulated):
    p = PacketParams(1.0, 0.1)
    got = group_velocity_residual(modulated, slow_grid, p, A_t1=np.zeros(slow_grid.shape))
    AX = slow_deriv(modulated, slow_grid, 1, 0)
    want = 2 * p.omega * p.omega_prime * _plain_norm(AX, slow_grid)
    assert got == pytest.approx(want, rel=1e-12)


# third order -----------------------------------------------------------------------------

def test_forcing_terms_sum_to_the_simplified_form(slow_grid, modulated):
    p = PacketParams(1.0, 0.1)
    B = gaussian(slow_grid, 0.3 - 0.2j, 2.0)
    At = modulated * (0.3 + 0.1j)
    terms = epsilon3_forcing(modulated, B, slow_grid, p, A_T=At)
    simple = simplified_forcing(modulated, slow_grid, p, A_T=At)
    assert (terms["total"] - simple).l2() <= 1e-13 * simple.l2()
    assert (terms["I6"] + terms["I9"]).l2() == 0.0
    # the second-order envelope drops out of the total
    without_b = epsilon3_forcing(modulated, 0 * B, slow_grid, p, A_T=At)["total"]
    assert terms["I1"].l2() > 0.01
    assert (terms["total"] - without_b).l2() <= 1e-13 * simple.l2()


def test_closure_vanishes_on_the_envelope_equation(slow_grid, modulated):
    p = PacketParams(1.0, 0.1)
    At = hnls_rhs(modulated, slow_grid, p)
    assert hnls_closure_residual(modulated, At, slow_grid, p) <= 1e-12


def test_closure_needs_the_mean_term(slow_grid, modulated):
    p = PacketParams(1.0, 0.1)
    At = hnls_rhs(modulated, slow_grid, p)
    assert hnls_closure_residual(modulated, At, slow_grid, p, M2=np.zeros(slow_grid.shape)) > 0.05


@pytest.mark.parametrize("delta", [1e-3, 0.1])
def test_closure_measures_a_wrong_time_derivative(slow_grid, modulated, delta):
    p = PacketParams(1.0, 0.1)
    At = hnls_rhs(modulated, slow_grid, p) + delta * modulated
    want = 2 * p.omega * delta * _plain_norm(modulated, slow_grid)
    assert hnls_closure_residual(modulated, At, slow_grid, p) == pytest.approx(want, rel=1e-10)


def test_closure_rejects_unknown_choice(slow_grid, modulated):
    with pytest.raises(ValueError):
        hnls_closure_residual(modulated, modulated, slow_grid, PacketParams(1.0, 0.1), M2="other")


# flat energy -------------------------------------------------------------------------------

@pytest.fixture
def random_pair(small_grid, rng):
    mk = lambda: Field.from_components(small_grid, rng.normal(size=small_grid.shape + (4,))).multiplier(
        lambda x1, x2: np.exp(-(x1**2 + x2**2) / 2.0))
    return mk(), mk()


def test_minus_h0_part_is_a_projection(random_pair):
    th, _ = random_pair
    P = minus_h0_part(th)
    assert (minus_h0_part(P) - P).l2() <= 1e-12 * P.l2()
    assert (P.hilbert() + P).l2() <= 1e-12 * P.l2()


def test_flat_energy_on_the_projected_subspace(random_pair):
    th, tt = random_pair
    P = minus_h0_part(th)
    e = flat_energy(P, tt)
    assert e == pytest.approx(tt.l2() ** 2 + half_derivative_energy(P), rel=1e-12)


def test_flat_energy_is_indefinite_off_the_subspace(random_pair):
    th, _ = random_pair
    plus = th - minus_h0_part(th)
    zero = th * 0.0
    # on H0 f = f the quadratic form flips sign
    assert flat_energy(plus, zero) == pytest.approx(-half_derivative_energy(plus), rel=1e-10)
