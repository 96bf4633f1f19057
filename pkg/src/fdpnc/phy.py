"""BPSK mapping, network coding, and the ML detectors at relay and end nodes."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Fixed enumeration order; on equal metrics the earlier hypothesis wins.
HYPOTHESES = np.array([(+1, +1), (+1, -1), (-1, +1), (-1, -1)])


class JointHypothesis(NamedTuple):
    s_a: int
    s_b: int
    metric: float


def modulate(d):
    """Bit 1 -> +1, bit 0 -> -1."""
    d = np.asarray(d)
    if np.any((d != 0) & (d != 1)):
        raise ValueError("bits must be 0 or 1")
    return (2 * d.astype(np.int8) - 1)[()]


def demodulate(s):
    """Symbol +1 -> 1, -1 -> 0."""
    return (np.asarray(s) > 0).astype(np.int8)[()]


def network_code(s_a, s_b):
    """Modulated XOR of the two end-node symbols: ``-s_a * s_b``."""
    return -np.multiply(s_a, s_b)


def relay_joint_detect(r, h_ar, h_br, e_a=1.0, e_b=1.0) -> JointHypothesis:
    """Joint minimum-distance decision on the symbol pair over all four hypotheses.

    Vectorized over ``r``/``h_ar``/``h_br``; the returned tuple then holds
    arrays.  Ties go to the first entry of :data:`HYPOTHESES`.
    """
    r = np.asarray(r)
    ga = np.sqrt(e_a) * np.asarray(h_ar)
    gb = np.sqrt(e_b) * np.asarray(h_br)
    # metrics: shape (4, *batch)
    expand = (slice(None),) + (None,) * np.broadcast(r, ga, gb).ndim
    sa = HYPOTHESES[:, 0][expand]
    sb = HYPOTHESES[:, 1][expand]
    metrics = np.abs(r - ga * sa - gb * sb) ** 2
    k = np.argmin(metrics, axis=0)
    best = np.take_along_axis(metrics, k[None], axis=0)[0]
    return JointHypothesis(HYPOTHESES[k, 0][()], HYPOTHESES[k, 1][()], best[()])


def endnode_detect(r, h_ir, e_r=1.0):
    """ML decision on the relay's symbol; +1 on an exact tie."""
    g = np.sqrt(e_r) * np.asarray(h_ir)
    d_plus = np.abs(r - g) ** 2
    d_minus = np.abs(r + g) ** 2
    return np.where(d_plus <= d_minus, 1, -1)[()]


def recover_partner(s_self_prev, s_r_hat):
    """Strip a node's own previous symbol out of the decoded relay symbol."""
    return -np.multiply(s_self_prev, s_r_hat)
