import numpy as np
import pytest
from hypothesis import given, strategies as st

from deepwave import quat
from deepwave import wavepacket as wp
from deepwave.hnls import PacketParams, gaussian
from deepwave.wavepacket import (
    GENERATORS, REGISTRY, TermEntry, TermSignature, build_b_tilde, build_lambda1, build_lambda3,
    build_order2, build_solution, check_commensurate, ledger_check, term_order, term_phase,
)

N_FAST = 128


@pytest.fixture
def p():
    return PacketParams(1.0, 0.1)


def _ones(grid, a=1.0):
    return np.full(grid.shape, a, dtype=complex)


def _phase(grid, p, t=0.0):
    fast = grid.refine(N_FAST, p.eps)
    return p.k * fast.coords[0] + p.omega * t


@pytest.mark.parametrize("t", [0.0, 0.37])
def test_lambda1_of_a_flat_envelope(slow_grid, p, t):
    lam = build_lambda1(_ones(slow_grid), slow_grid, p, t).realize(N_FAST).components()
    phi = _phase(slow_grid, p, t)
    np.testing.assert_allclose(lam[..., 0], 0, atol=1e-12)
    np.testing.assert_allclose(lam[..., 1], np.cos(phi), atol=1e-12)
    np.testing.assert_allclose(lam[..., 2], 0, atol=1e-12)
    np.testing.assert_allclose(lam[..., 3], np.sin(phi), atol=1e-12)


def test_height_is_the_k_part_of_lambda1(slow_grid, p, envelope):
    s = wp.packet_inputs(envelope, None, slow_grid, p)
    lam, z = wp.lambda1_of(s.A, s.E), wp.z1_of(s.A, s.E)
    diff = lam.component(3).realize(N_FAST).components()[..., 0] - z.realize(N_FAST).components()[..., 0]
    assert np.max(np.abs(diff)) <= 1e-12


@pytest.mark.parametrize("a0", [0.3, 1.0, 2.5])
def test_second_order_of_a_real_constant(slow_grid, p, a0):
    z2, lam2 = build_order2(_ones(slow_grid, a0), None, slow_grid, p)
    want = 0.5 * p.k * a0**2
    zc = z2.realize(N_FAST).components()
    lc = lam2.realize(N_FAST).components()
    np.testing.assert_allclose(zc[..., 0], want, atol=1e-12)
    np.testing.assert_allclose(lc[..., :3], 0, atol=1e-12)
    np.testing.assert_allclose(lc[..., 3], want, atol=1e-12)


def test_third_order_has_no_scalar_part(slow_grid, p, rng):
    A = gaussian(slow_grid, 0.9 * np.exp(1j * rng.uniform(0, 6)), 1.5, kx=0.2)
    B = gaussian(slow_grid, 0.3 + 0.4j, 2.0, kx=-0.3)
    lam = build_lambda3(A, B, slow_grid, p)
    scale = lam.realize(N_FAST).maxabs()
    assert scale > 0.1
    assert lam.component(0).realize(N_FAST).maxabs() <= 1e-11 * scale


def test_b_tilde_of_a_flat_envelope(slow_grid, p):
    b = build_b_tilde(_ones(slow_grid), slow_grid, p).realize(N_FAST).components()
    np.testing.assert_allclose(b[..., 1], -p.eps**2 * p.k * p.omega, atol=1e-14)
    np.testing.assert_allclose(b[..., [0, 2, 3]], 0, atol=1e-14)


def test_b_tilde_hook_is_one_order_higher(slow_grid, p, envelope):
    base = build_b_tilde(envelope, slow_grid, p)
    hooked = build_b_tilde(envelope, slow_grid, p, b3=lambda s: s.A.lmul(quat.J))
    extra = (hooked - base).realize(N_FAST).maxabs()
    assert extra == pytest.approx(p.eps**3 * np.max(np.abs(envelope)), rel=1e-3)


def test_solution_orders_scale_with_eps(slow_grid, envelope):
    p = PacketParams(1.0, 0.05)
    sol = build_solution(envelope, None, slow_grid, p)
    assert (sol.lam(1) - sol.lambda_orders[0] * p.eps).l2() == 0.0
    assert (sol.z(2) - sol.z_orders[0] * p.eps - sol.z_orders[1] * p.eps**2).l2() <= 1e-15
    snap = sol.snapshot(N_FAST)
    assert snap["lambda"].grid.na == N_FAST
    np.testing.assert_allclose(sol.A_tilde, 1.0)


def test_moving_frame_shifts_the_envelope(slow_grid, p, envelope):
    t = 5.0
    s = wp.packet_inputs(envelope, None, slow_grid, p, t)
    shift = p.eps * p.omega_prime * t
    X, Y = slow_grid.coords
    want = gaussian(slow_grid, 1.0, 1.5, center=(slow_grid.la / 2 - shift, slow_grid.lb / 2))
    band1 = s.A.u[s.A.bands]
    assert np.max(np.abs(band1 - want)) <= 1e-8


@pytest.mark.parametrize("eps", [0.3, 0.07])
def test_incommensurate_carrier_is_rejected(slow_grid, eps):
    with pytest.raises(ValueError, match="not periodic"):
        check_commensurate(slow_grid, PacketParams(1.0, eps))
    with pytest.raises(ValueError):
        build_lambda1(_ones(slow_grid), slow_grid, PacketParams(1.0, eps))


def test_envelope_shape_checked(slow_grid, small_grid, p):
    with pytest.raises(ValueError, match="slow grid"):
        build_lambda1(_ones(small_grid), slow_grid, p)


# order / phase bookkeeping ---------------------------------------------------------------

@pytest.mark.parametrize("factors,order,phase", [
    (("A",), 1, 1),
    (("dX", "Abar", "A"), 3, 0),
    (("R1", "Bbar", "dT"), 4, -1),
    (("R2", "R1"), 0, 0),
])
def test_signature_examples(factors, order, phase):
    t = TermSignature(factors)
    assert (term_order(t), term_phase(t)) == (order, phase)


words = st.lists(st.sampled_from(GENERATORS), max_size=6).map(tuple)


@given(words, words)
def test_order_and_phase_are_additive(a, b):
    s, t = TermSignature(a), TermSignature(b)
    assert term_order(s * t) == term_order(s) + term_order(t)
    assert term_phase(s * t) == term_phase(s) + term_phase(t)


def test_unknown_generator():
    with pytest.raises(ValueError):
        TermSignature(("A", "C"))


def test_registered_terms_are_consistent():
    rep = ledger_check()
    assert rep.ok, rep.table()
    assert rep.checked == len(REGISTRY) == 15


@pytest.mark.parametrize("field_name,delta", [("eps_power", 1), ("phase", -2)])
def test_corrupted_entry_is_flagged(field_name, delta):
    e = REGISTRY[5]
    bad = TermEntry(e.name, e.signature, e.eps_power + (delta if field_name == "eps_power" else 0),
                    e.phase + (delta if field_name == "phase" else 0))
    rep = ledger_check(list(REGISTRY[:5]) + [bad])
    assert not rep.ok
    assert len(rep.violations) == 1 and e.name in rep.violations[0]
    assert "VIOLATION" in rep.table()


def test_unregistered_entry_raises():
    names = [e.name for e in REGISTRY]
    extra = TermEntry("stray term", TermSignature(("A",)), 1, 1)
    with pytest.raises(KeyError, match="stray term"):
        ledger_check(list(REGISTRY) + [extra], registered=names)
    assert ledger_check(REGISTRY, registered=names).ok
