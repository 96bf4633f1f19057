"""Rayleigh fading, AWGN and residual self-interference for one or many slots.

Every function accepts an optional ``size`` so the same code serves a single
slot (scalars) and a vectorized batch (arrays).  A silent relay is encoded as
the symbol ``0``, which removes its term from both receive equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SystemParams

SILENT = 0


def complex_normal(rng: np.random.Generator, size=None):
    """Circularly-symmetric CN(0, 1) draws (variance 1/2 per dimension)."""
    z = rng.standard_normal(size=(2,) if size is None else (*np.atleast_1d(size), 2))
    out = (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
    return complex(out[()]) if size is None else out


@dataclass(frozen=True)
class ChannelState:
    """The five coefficients of one slot (or arrays of them for a batch).

    ``h_ar`` and ``h_br`` are reciprocal: the relay's downlink to A and B
    reuses them.  ``h_aa``, ``h_bb`` and ``h_rr`` are the SI loops.
    """

    h_ar: complex
    h_br: complex
    h_aa: complex
    h_bb: complex
    h_rr: complex

    def link(self, node: str):
        """Coefficient between ``node`` and the relay."""
        return {"A": self.h_ar, "B": self.h_br}[node]

    def loop(self, node: str):
        return {"A": self.h_aa, "B": self.h_bb, "R": self.h_rr}[node]

    def __getitem__(self, idx):
        return ChannelState(
            self.h_ar[idx], self.h_br[idx], self.h_aa[idx], self.h_bb[idx], self.h_rr[idx]
        )


def draw_channel_state(rng: np.random.Generator, size=None) -> ChannelState:
    """Five independent CN(0, 1) coefficients per slot, one fresh set per slot."""
    shape = () if size is None else tuple(np.atleast_1d(size))
    h = complex_normal(rng, (*shape, 5))
    if size is None:
        return ChannelState(*(complex(x) for x in h))
    return ChannelState(*np.moveaxis(h, -1, 0))


def draw_noise(variance: float, rng: np.random.Generator, size=None):
    """Complex AWGN with total variance ``variance`` split evenly over I and Q.

    Random numbers are consumed even when ``variance == 0`` so that streams stay
    aligned across parameter sets; the returned sample is then exactly zero.
    """
    if variance < 0:
        raise ValueError(f"NegativeVariance: noise variance {variance!r} < 0")
    w = complex_normal(rng, size)
    if variance == 0:
        return 0j if size is None else np.zeros_like(w)
    return np.sqrt(variance) * w


def relay_rx(s_a, s_b, s_r, ch: ChannelState, params: SystemParams, noise):
    """Superposition received at the relay.

    ``noise`` is either a pre-drawn sample (already scaled to the relay's
    variance) or a Generator to draw it from.  ``s_r`` is the relay's own
    current transmission, or :data:`SILENT`.
    """
    if isinstance(noise, np.random.Generator):
        noise = draw_noise(params.noise_var_r, noise, None if np.ndim(s_a) == 0 else np.shape(s_a))
    return (
        np.sqrt(params.energy_a) * ch.h_ar * s_a
        + np.sqrt(params.energy_b) * ch.h_br * s_b
        + params.kappa_r * np.sqrt(params.energy_r) * ch.h_rr * s_r
        + noise
    )


def endnode_rx(node: str, s_r, s_self, ch: ChannelState, params: SystemParams, noise):
    """Sample received at end node ``"A"`` or ``"B"``: relay downlink plus own SI."""
    if node == "A":
        energy, kappa, var = params.energy_a, params.kappa_a, params.noise_var_a
    elif node == "B":
        energy, kappa, var = params.energy_b, params.kappa_b, params.noise_var_b
    else:
        raise ValueError(f"node must be 'A' or 'B', got {node!r}")
    if isinstance(noise, np.random.Generator):
        noise = draw_noise(var, noise, None if np.ndim(s_self) == 0 else np.shape(s_self))
    return (
        np.sqrt(params.energy_r) * ch.link(node) * s_r
        + kappa * np.sqrt(energy) * ch.loop(node) * s_self
        + noise
    )
