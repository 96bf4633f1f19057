import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fdpnc.core import SystemParams
from fdpnc.theory import (
    ConventionViolation,
    Regime,
    Scheme,
    alpha_broadcast,
    ber_broadcast,
    ber_end_to_end,
    ber_end_to_end_composed,
    ber_relay,
    ber_relay_composed,
    ber_relay_stream,
    error_floor,
    error_floor_unit,
    q_function,
    regime,
    sinr_at_endnode,
    sinr_at_relay,
    slots_per_exchange,
    theory_point,
    time_savings,
)

# mpmath erfc at 40 digits
Q_OF_ONE = 0.15865525393145705141


def normal_tail_quad(x):
    pdf = lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi)
    return integrate.quad(pdf, x, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def rayleigh_average_quad(gamma):
    """E[Q(sqrt(2 z gamma))] for z ~ Exp(1), by quadrature."""
    f = lambda z: 0.5 * math.erfc(math.sqrt(z * gamma)) * math.exp(-z)
    return integrate.quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert abs(q_function(1.0) - Q_OF_ONE) <= 1e-12
    assert abs(q_function(1.0) - normal_tail_quad(1.0)) <= 1e-12
    assert 0 <= q_function(40.0) < 1e-300


def test_q_function_vectorized_symmetry():
    x = np.linspace(-6, 6, 101)
    np.testing.assert_allclose(q_function(x) + q_function(-x), 1.0, atol=1e-15)


def test_sinr_examples():
    p = SystemParams(noise_var_r=0.1)
    assert sinr_at_relay(p, "A") == pytest.approx(10.0, rel=1e-15)
    p = SystemParams(noise_var_r=0.0, kappa_r=1.0)
    assert sinr_at_relay(p, "B") == 1.0
    p = SystemParams(energy_a=1.0, noise_var_r=0.3, kappa_r=0.2)
    assert sinr_at_relay(p.scaled(2.0), "A") == pytest.approx(sinr_at_relay(p, "A"), rel=1e-15)


def test_endnode_sinr_uses_own_si():
    p = SystemParams(noise_var_a=0.1, kappa_a=0.5, energy_a=2.0, energy_r=3.0)
    assert sinr_at_endnode(p, "A") == pytest.approx(3.0 / (0.1 + 0.25 * 2.0))


def test_ber_relay_stream_examples():
    assert ber_relay_stream(SystemParams.symmetric(sigma2=1e-300), "A") == pytest.approx(0.0, abs=1e-15)
    p = SystemParams.symmetric(sigma2=1.0)
    assert abs(ber_relay_stream(p, "A") - 0.1464466094067262378) <= 1e-12


@pytest.mark.parametrize("sigma2, kappa", [(1.0, 0.0), (0.1, 0.1), (0.01, 0.3), (1e-3, 0.0), (0.5, 1.0)])
def test_ber_relay_stream_matches_quadrature(sigma2, kappa):
    p = SystemParams.symmetric(sigma2=sigma2, kappa=kappa)
    gamma = sinr_at_relay(p, "A")
    assert abs(ber_relay_stream(p, "A") - rayleigh_average_quad(gamma)) <= 1e-6


def test_ber_broadcast_matches_quadrature():
    p = SystemParams(noise_var_a=0.05, kappa_a=0.2, energy_r=1.5)
    assert abs(ber_broadcast(p, "A") - rayleigh_average_quad(sinr_at_endnode(p, "A"))) <= 1e-6


def test_ber_relay_examples():
    assert ber_relay(SystemParams.symmetric(sigma2=1.0)) == pytest.approx(0.25, abs=1e-15)
    p = SystemParams.symmetric(sigma2=0.0, kappa=0.1)
    assert ber_relay(p) == pytest.approx(0.004950495049504950495, abs=1e-15)


def test_ber_end_to_end_limits():
    assert ber_end_to_end(SystemParams.symmetric(sigma2=1e-300)) == pytest.approx(0, abs=1e-15)
    p = SystemParams.symmetric(38.0, kappa=2e-4)
    value = ber_end_to_end(p)
    assert 0.9e-4 <= value <= 1.4e-4
    assert value == pytest.approx(0.00011887343296790705336, rel=1e-9)


def test_error_floor_examples():
    assert error_floor(SystemParams.symmetric(sigma2=0.1)) == 0.0
    p = SystemParams.symmetric(sigma2=0.1, kappa=0.1)
    assert abs(error_floor(p) - 0.0074073315792132991756) <= 1e-12
    assert error_floor(p) == pytest.approx(error_floor_unit(0.1, 0.1), abs=1e-15)


def test_error_floor_general_energies_is_noise_limit():
    p = SystemParams(energy_a=2.0, energy_b=0.5, energy_r=3.0, noise_var_a=1e-13,
                     noise_var_b=1e-13, noise_var_r=1e-13, kappa_a=0.2, kappa_r=0.3)
    assert ber_end_to_end(p) - error_floor(p) == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("x, y", [(0.1, 0.01), (0.05, 0.001), (0.3, 0.2), (1.0, 0.5)])
def test_relay_si_hurts_more(x, y):
    assert error_floor_unit(x, y) > error_floor_unit(y, x)


@pytest.mark.parametrize("kappa", [1e-3, 1e-2, 1e-1])
def test_floor_is_noise_limit(kappa):
    p = SystemParams.symmetric(sigma2=1e-12, kappa=kappa)
    assert 0 <= ber_end_to_end(p) - error_floor(p) <= 1e-6


def test_regime():
    assert regime(SystemParams.symmetric(sigma2=0.1, kappa=0.1)) is Regime.NOISE_LIMITED
    assert regime(SystemParams.symmetric(sigma2=0.02, kappa=0.1)) is Regime.SI_LIMITED
    assert regime(SystemParams.symmetric(sigma2=1e-9, kappa=0.0)) is Regime.NOISE_LIMITED
    with pytest.raises(ConventionViolation):
        regime(SystemParams(kappa_r=0.1, kappa_a=0.2))
    with pytest.raises(ConventionViolation):
        regime(SystemParams(energy_a=2.0))


def test_slots_and_savings():
    assert [slots_per_exchange(s) for s in Scheme] == [1, 2, 3]
    assert time_savings("fd_pnc", "pnc") == 50.0
    assert time_savings(Scheme.FD_PNC, Scheme.CLASSICAL_NC) == 66.7
    assert time_savings("pnc", "pnc") == 0.0


params_strategy = st.builds(
    SystemParams,
    energy_a=st.floats(0.01, 100), energy_b=st.floats(0.01, 100), energy_r=st.floats(0.01, 100),
    noise_var_a=st.floats(1e-6, 100), noise_var_b=st.floats(1e-6, 100), noise_var_r=st.floats(1e-6, 100),
    kappa_a=st.floats(0, 2), kappa_b=st.floats(0, 2), kappa_r=st.floats(0, 2),
)


@given(params_strategy)
def test_compositions_match_closed_forms(p):
    assert abs(ber_relay_composed(p) - ber_relay(p)) <= 1e-12
    for node in "AB":
        assert abs(ber_end_to_end_composed(p, node) - ber_end_to_end(p, node)) <= 1e-12


@given(params_strategy)
def test_probabilities_in_range(p):
    tp = theory_point(p)
    for a in (tp.alpha_a, tp.alpha_b, tp.alpha_r):
        assert 0 < a <= 1
    for b in (tp.ber_relay, tp.ber_end, tp.ber_end_b):
        assert 0 <= b <= 0.5
    assert tp.ber_end >= tp.ber_relay
    assert 0 <= tp.floor < 0.5


# A node's energy also scales its own residual SI, so BER at A is monotone in
# E_A only when kappa_a = 0 and in E_R only when kappa_r = 0.
_SI_OF = {"energy_a": "kappa_a", "energy_r": "kappa_r", "energy_b": None}


@settings(max_examples=200)
@given(params_strategy, st.sampled_from(["energy_a", "energy_b", "energy_r", "noise_var_a",
                                         "noise_var_r", "kappa_a", "kappa_r"]),
       st.floats(1.01, 10))
def test_monotonicity(p, name, factor):
    if _SI_OF.get(name):
        p = p.replace(**{_SI_OF[name]: 0.0})
    bigger = p.replace(**{name: getattr(p, name) * factor})
    before, after = ber_end_to_end(p, "A"), ber_end_to_end(bigger, "A")
    if name.startswith("energy_"):
        assert after <= before + 1e-15
    else:
        assert after >= before - 1e-15


def test_relay_energy_not_monotone_under_relay_si():
    p = SystemParams.symmetric(sigma2=1.0, kappa=0.0).replace(kappa_r=1.0)
    assert ber_end_to_end(p.replace(energy_r=2.0)) > ber_end_to_end(p)


def test_monotone_ladders():
    snr = np.arange(0, 60, 2.5)
    for kappa in (0.0, 1e-3, 1e-2, 1e-1):
        curve = [ber_end_to_end(SystemParams.symmetric(s, kappa=kappa)) for s in snr]
        assert np.all(np.diff(curve) <= 0)


def test_symmetric_nodes_agree():
    p = SystemParams.symmetric(17.0, kappa=0.03)
    assert ber_end_to_end(p, "A") == ber_end_to_end(p, "B")


def test_alpha_r_uses_node_energy():
    p = SystemParams(energy_a=4.0, energy_r=1.0, noise_var_a=0.0, kappa_a=0.5, noise_var_r=0.1)
    assert alpha_broadcast(p, "A") == pytest.approx(1.0 / (1.0 + 0.25 * 4.0))
