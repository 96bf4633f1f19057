"""Closed-form error rates of the full-duplex network-coded relay link.

Every average BER here has the Rayleigh/BPSK form ``(1 - sqrt(alpha)) / 2``
where ``alpha`` is a product of per-hop factors ``E / (E + D)`` and ``D`` is
the interference-plus-noise power of that hop.  To keep precision when
``alpha`` is close to 1 (high SNR, small floors) the factors are carried as
``log1p(-D / (E + D))`` and the final value is formed with ``expm1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import SystemParams

__all__ = [
    "TheoryPoint",
    "ConventionViolation",
    "Regime",
    "Scheme",
    "q_function",
    "sinr_at_relay",
    "sinr_at_endnode",
    "alpha_relay_stream",
    "alpha_broadcast",
    "ber_relay_stream",
    "ber_broadcast",
    "ber_relay",
    "ber_end_to_end",
    "error_floor",
    "regime",
    "regime_boundary",
    "slots_per_exchange",
    "time_savings",
    "theory_point",
]


class ConventionViolation(ValueError):
    """A formula was asked for outside the parameter convention it is defined on."""


class Regime(str, enum.Enum):
    NOISE_LIMITED = "noise_limited"
    SI_LIMITED = "si_limited"


class Scheme(str, enum.Enum):
    FD_PNC = "fd_pnc"
    PNC = "pnc"
    CLASSICAL_NC = "classical_nc"


_SLOTS = {Scheme.FD_PNC: 1, Scheme.PNC: 2, Scheme.CLASSICAL_NC: 3}


def q_function(x):
    """Gaussian tail probability ``P(N(0,1) > x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))[()]


def _check_node(node):
    if node not in ("A", "B"):
        raise ValueError(f"node must be 'A' or 'B', got {node!r}")


def _endnode_terms(params, node):
    _check_node(node)
    if node == "A":
        return params.energy_a, params.kappa_a, params.noise_var_a
    return params.energy_b, params.kappa_b, params.noise_var_b


# The relay's noise variance is used for both uplink streams: it is the noise
# actually added at the receiver that detects them.
def _relay_impairment(params: SystemParams) -> float:
    return params.noise_var_r + params.kappa_r**2 * params.energy_r


def _broadcast_impairment(params: SystemParams, node: str) -> float:
    energy, kappa, var = _endnode_terms(params, node)
    return var + kappa**2 * energy


def sinr_at_relay(params: SystemParams, node: str) -> float:
    """Average SINR of ``node``'s uplink stream at the relay."""
    _check_node(node)
    energy = params.energy_a if node == "A" else params.energy_b
    return energy / _relay_impairment(params)


def sinr_at_endnode(params: SystemParams, node: str) -> float:
    """Average SINR of the relay's downlink at end node ``node``."""
    return params.energy_r / _broadcast_impairment(params, node)


def alpha_relay_stream(params: SystemParams, node: str) -> float:
    _check_node(node)
    energy = params.energy_a if node == "A" else params.energy_b
    return energy / (energy + _relay_impairment(params))


def alpha_broadcast(params: SystemParams, node: str) -> float:
    return params.energy_r / (params.energy_r + _broadcast_impairment(params, node))


def _log_alpha(energy, impairment):
    return math.log1p(-impairment / (energy + impairment))


def _ber_from_log_alpha(log_alpha):
    # (1 - exp(log_alpha / 2)) / 2 without cancellation
    return -0.5 * math.expm1(0.5 * log_alpha)


def _log_alpha_relay(params, node):
    energy = params.energy_a if node == "A" else params.energy_b
    return _log_alpha(energy, _relay_impairment(params))


def _log_alpha_broadcast(params, node):
    return _log_alpha(params.energy_r, _broadcast_impairment(params, node))


def ber_relay_stream(params: SystemParams, node: str) -> float:
    """Average BER of one uplink stream at the relay, single-user Rayleigh form."""
    _check_node(node)
    return _ber_from_log_alpha(_log_alpha_relay(params, node))


def ber_broadcast(params: SystemParams, node: str) -> float:
    """Average BER of the relay's downlink symbol as detected at ``node``."""
    return _ber_from_log_alpha(_log_alpha_broadcast(params, node))


def ber_relay(params: SystemParams) -> float:
    """Average error rate of the relay's network-coded symbol."""
    return _ber_from_log_alpha(_log_alpha_relay(params, "A") + _log_alpha_relay(params, "B"))


def ber_relay_composed(params: SystemParams) -> float:
    """Same quantity as :func:`ber_relay`, built from exactly-one-stream-wrong events."""
    pa = ber_relay_stream(params, "A")
    pb = ber_relay_stream(params, "B")
    return pa * (1 - pb) + pb * (1 - pa)


def ber_end_to_end(params: SystemParams, node: str = "A") -> float:
    """Average error rate of the partner bit recovered at ``node``."""
    return _ber_from_log_alpha(
        _log_alpha_relay(params, "A")
        + _log_alpha_relay(params, "B")
        + _log_alpha_broadcast(params, node)
    )


def ber_end_to_end_composed(params: SystemParams, node: str = "A") -> float:
    """:func:`ber_end_to_end` as relay error XOR downlink error (independent events)."""
    pr = ber_relay(params)
    pb = ber_broadcast(params, node)
    return pr * (1 - pb) + (1 - pr) * pb


def error_floor(params: SystemParams, node: str = "A") -> float:
    """Limit of :func:`ber_end_to_end` as every noise variance goes to zero.

    For unit energies this is ``1/2 - 1 / (2 (1 + kr^2) sqrt(1 + ki^2))``.
    """
    energy, kappa, _ = _endnode_terms(params, node)
    si_r = params.kappa_r**2 * params.energy_r
    log_alpha = (
        _log_alpha(params.energy_a, si_r)
        + _log_alpha(params.energy_b, si_r)
        + _log_alpha(params.energy_r, kappa**2 * energy)
    )
    return _ber_from_log_alpha(log_alpha)


def error_floor_unit(kappa_r: float, kappa_end: float) -> float:
    """Unit-energy floor written directly in terms of the two kappas."""
    return 0.5 - 1.0 / (2.0 * (1.0 + kappa_r**2) * math.sqrt(1.0 + kappa_end**2))


def _require_symmetric_unit(params):
    if not params.is_unit_energy:
        raise ConventionViolation("regime boundary is defined for unit energies only")
    if params.kappa_r != params.kappa_a:
        raise ConventionViolation(
            f"regime boundary needs kappa_r == kappa_a (got {params.kappa_r}, {params.kappa_a})"
        )


def regime_boundary(kappa: float) -> float:
    """Noise variance separating the two regimes at unit energy: ``2 kappa^2``."""
    return 2.0 * kappa**2


def regime(params: SystemParams) -> Regime:
    """Noise-limited iff the relay noise variance exceeds ``2 kappa^2``.

    The boundary itself counts as SI-limited.
    """
    _require_symmetric_unit(params)
    if params.noise_var_r > regime_boundary(params.kappa_r):
        return Regime.NOISE_LIMITED
    return Regime.SI_LIMITED


def slots_per_exchange(scheme) -> int:
    """Time slots needed for A and B to swap one bit each."""
    return _SLOTS[Scheme(scheme)]


def time_savings(scheme, baseline) -> float:
    """Percentage of airtime ``scheme`` saves against ``baseline``, one decimal."""
    ours, theirs = slots_per_exchange(scheme), slots_per_exchange(baseline)
    return round(100.0 * (1.0 - ours / theirs), 1)


@dataclass(frozen=True)
class TheoryPoint:
    gamma_a: float
    gamma_b: float
    gamma_r: float
    alpha_a: float
    alpha_b: float
    alpha_r: float
    ber_relay: float
    ber_end: float
    ber_end_b: float
    floor: float
    regime: Regime | None


def theory_point(params: SystemParams) -> TheoryPoint:
    """Evaluate every closed form for one parameter set (``gamma_r``/``alpha_r`` for node A)."""
    try:
        reg = regime(params)
    except ConventionViolation:
        reg = None
    return TheoryPoint(
        gamma_a=sinr_at_relay(params, "A"),
        gamma_b=sinr_at_relay(params, "B"),
        gamma_r=sinr_at_endnode(params, "A"),
        alpha_a=alpha_relay_stream(params, "A"),
        alpha_b=alpha_relay_stream(params, "B"),
        alpha_r=alpha_broadcast(params, "A"),
        ber_relay=ber_relay(params),
        ber_end=ber_end_to_end(params, "A"),
        ber_end_b=ber_end_to_end(params, "B"),
        floor=error_floor(params, "A"),
        regime=reg,
    )
