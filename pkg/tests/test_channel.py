import numpy as np
import pytest

from fdpnc.channel import SILENT, ChannelState, draw_channel_state, draw_noise, endnode_rx, relay_rx
from fdpnc.core import SystemParams, substream

N = 10**6


@pytest.fixture(scope="module")
def many_states():
    return draw_channel_state(substream(99, 0), N)


def test_channel_state_reproducible():
    a = draw_channel_state(substream(1, 0))
    b = draw_channel_state(substream(1, 0))
    assert a == b
    assert all(isinstance(h, complex) for h in (a.h_ar, a.h_br, a.h_aa, a.h_bb, a.h_rr))


def test_unit_energy(many_states):
    for h in (many_states.h_ar, many_states.h_br, many_states.h_aa, many_states.h_bb, many_states.h_rr):
        assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.01)


def test_power_is_exponential(many_states):
    # |h|^2 ~ Exp(1): P(|h|^2 > 1) = e^-1
    assert np.mean(np.abs(many_states.h_ar) ** 2 > 1) == pytest.approx(np.exp(-1), abs=0.005)


def test_circular_symmetry(many_states):
    h = many_states.h_ar
    assert np.var(h.real) == pytest.approx(0.5, rel=0.01)
    assert np.var(h.imag) == pytest.approx(0.5, rel=0.01)
    assert abs(np.mean(h.real * h.imag)) < 0.003


def test_independent_across_slots(many_states):
    g = np.abs(many_states.h_ar) ** 2
    lag1 = np.corrcoef(g[:-1], g[1:])[0, 1]
    assert abs(lag1) < 0.01


def test_coefficients_mutually_independent(many_states):
    c = np.corrcoef(np.abs(many_states.h_ar) ** 2, np.abs(many_states.h_rr) ** 2)[0, 1]
    assert abs(c) < 0.01


def test_zero_variance_noise_is_exactly_zero():
    assert draw_noise(0.0, substream(3)) == 0j
    assert np.all(draw_noise(0.0, substream(3), 10) == 0)


def test_noise_statistics():
    w = draw_noise(0.5, substream(5), N)
    assert np.mean(np.abs(w) ** 2) == pytest.approx(0.5, rel=0.01)
    assert np.var(w.real) == pytest.approx(0.25, rel=0.01)
    assert np.var(w.imag) == pytest.approx(0.25, rel=0.01)
    assert abs(np.mean(w)) < 0.003


def test_negative_variance():
    with pytest.raises(ValueError, match="NegativeVariance"):
        draw_noise(-1.0, substream(0))


def test_zero_variance_consumes_same_randomness():
    r1, r2 = substream(8), substream(8)
    draw_noise(0.0, r1, 100)
    draw_noise(1.0, r2, 100)
    assert r1.standard_normal() == r2.standard_normal()


UNIT = ChannelState(1 + 0j, 1 + 0j, 0.5 + 0j, 0j, 1 + 0j)


def _params(**kw):
    base = dict(noise_var_a=0.0, noise_var_b=0.0, noise_var_r=0.0)
    base.update(kw)
    return SystemParams(**base)


def test_relay_rx_antipodal_cancels():
    assert relay_rx(+1, -1, SILENT, UNIT, _params(), 0j) == 0


def test_relay_rx_constructive():
    assert relay_rx(+1, +1, SILENT, UNIT, _params(), 0j) == 2


def test_relay_rx_adds_own_si():
    r = relay_rx(+1, +1, +1, UNIT, _params(kappa_r=0.1), 0j)
    assert r == pytest.approx(2.1, abs=1e-15)


def test_relay_rx_draws_noise_from_generator():
    p = _params(noise_var_r=0.3)
    r = relay_rx(+1, +1, SILENT, UNIT, p, substream(4, 4))
    w = draw_noise(0.3, substream(4, 4))
    assert r == 2 + w


def test_endnode_rx_downlink_only():
    assert endnode_rx("A", -1, +1, UNIT, _params(), 0j) == -1


def test_endnode_rx_with_own_si():
    r = endnode_rx("A", -1, +1, UNIT, _params(kappa_a=1.0), 0j)
    assert r == pytest.approx(-0.5, abs=1e-15)


def test_endnode_rx_zero_channel_is_noise_only():
    zero = ChannelState(0j, 0j, 0j, 0j, 0j)
    assert endnode_rx("B", +1, -1, zero, _params(kappa_b=0.3), 0.25 - 0.5j) == 0.25 - 0.5j


def test_endnode_rx_uses_reciprocal_link():
    ch = ChannelState(1 + 0j, 2 + 0j, 0j, 0j, 0j)
    assert endnode_rx("B", +1, +1, ch, _params(), 0j) == 2


def test_noiseless_relay_on_constellation():
    rng = substream(12)
    ch = draw_channel_state(rng, 1000)
    s = rng.choice([-1, 1], size=(2, 1000))
    p = _params(energy_a=2.0, energy_b=0.5)
    r = relay_rx(s[0], s[1], SILENT, ch, p, np.zeros(1000))
    pts = np.stack([
        np.sqrt(2.0) * ch.h_ar * a + np.sqrt(0.5) * ch.h_br * b for a in (1, -1) for b in (1, -1)
    ])
    assert np.all(np.min(np.abs(pts - r), axis=0) == 0)
