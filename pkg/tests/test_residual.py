import numpy as np
import pytest

from deepwave.hnls import PacketParams, gaussian
from deepwave.residual import residual_field, residual_parts


@pytest.fixture(scope="module")
def packet(small_grid):
    return gaussian(small_grid, 1.0, 1.5)


def test_zero_envelope_has_zero_residual(small_grid):
    r = residual_field(np.zeros(small_grid.shape, complex), small_grid, PacketParams(1.0, 0.1))
    assert r.l2() == 0.0


def test_parts_add_up(small_grid, packet):
    parts = residual_parts(packet, small_grid, PacketParams(1.0, 0.1))
    total = parts.lhs - parts.commutator + parts.j1 + parts.j2
    assert (parts.total - total).l2() == 0.0


@pytest.mark.parametrize("kw,exc", [(dict(orders=4), ValueError), (dict(orders=0), ValueError)])
def test_bad_arguments(small_grid, packet, kw, exc):
    with pytest.raises(exc):
        residual_field(packet, small_grid, PacketParams(1.0, 0.1), **kw)


def test_incommensurate_eps(small_grid, packet):
    with pytest.raises(ValueError, match="not periodic"):
        residual_field(packet, small_grid, PacketParams(1.0, 0.3))


@pytest.fixture(scope="module")
def ladder(small_grid, packet):
    eps = (0.2, 0.1)
    return {o: [residual_field(packet, small_grid, PacketParams(1.0, e), orders=o).l2() for e in eps]
            for o in (1, 3)}


def test_first_order_packet_leaves_an_eps_squared_residual(ladder):
    a, b = ladder[1]
    assert 1.8 <= np.log2(a / b) <= 2.2


def test_higher_correctors_gain_an_order(ladder):
    a, b = ladder[3]
    assert np.log2(a / b) >= 2.8
    assert b < 0.1 * ladder[1][1]
