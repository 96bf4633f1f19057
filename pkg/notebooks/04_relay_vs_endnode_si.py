"""
Where should the better full-duplex radio go?
=============================================

Swap the residual SI between relay and end nodes and compare.  The relay's SI
hits both uplink streams, so it costs more than the same SI at an end node.
"""

import itertools

import numpy as np

from fdpnc.core import SystemParams
from fdpnc.sim import StopRule, run_campaign
from fdpnc.theory import ber_end_to_end

grid = [1e-3, 1e-2, 3e-2, 1e-1]
for snr in (20.0, 40.0):
    base = SystemParams.symmetric(snr)
    print(f"\nSNR {snr:g} dB: rows kappa_r, columns kappa_a")
    print("        " + "".join(f"{k:>11g}" for k in grid))
    for kr in grid:
        row = [ber_end_to_end(base.replace(kappa_r=kr, kappa_a=ka, kappa_b=ka)) for ka in grid]
        print(f"{kr:>8g}" + "".join(f"{v:11.3e}" for v in row))

###############################################################################
# Every swap favours the quieter relay.

base = SystemParams.symmetric(20.0)
for x, y in itertools.permutations(grid, 2):
    if x > y:
        worse = ber_end_to_end(base.replace(kappa_r=x, kappa_a=y, kappa_b=y))
        better = ber_end_to_end(base.replace(kappa_r=y, kappa_a=x, kappa_b=x))
        assert worse > better

###############################################################################
# And the simulator agrees at the largest contrast.

stop = StopRule(min_errors=5000)
for kr, ka in [(0.1, 0.01), (0.01, 0.1)]:
    r = run_campaign(base.replace(kappa_r=kr, kappa_a=ka, kappa_b=ka, seed=5), stop, workers=4)
    lo, hi = r.ber_end_a_hat - 3 * r.stderr_end_a, r.ber_end_a_hat + 3 * r.stderr_end_a
    print(f"kappa_r={kr:g}, kappa_a={ka:g}: {r.ber_end_a_hat:.4e}  3-sigma [{lo:.4e}, {hi:.4e}]")
