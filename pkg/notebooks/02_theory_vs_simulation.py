"""
Relay and end-to-end BER: closed form against Monte Carlo
=========================================================

Sweep SNR for three residual-SI levels (the same kappa at every node) and
compare simulated error rates to their closed forms.  Dotted lines mark the
error floors; the vertical lines mark where noise stops dominating
(``sigma2 = 2 kappa^2``).
"""

import numpy as np

from fdpnc.core import SystemParams, linear_to_db
from fdpnc.sim import StopRule, run_campaign, scoreboard
from fdpnc.theory import error_floor, regime_boundary, theory_point

snr_db = np.arange(0, 45, 5)
kappas = [0.0, 1e-2, 1e-1]
stop = StopRule(min_errors=200, max_slots=2 * 10**6)

table = {}
for kappa in kappas:
    for snr in snr_db:
        p = SystemParams.symmetric(float(snr), kappa=kappa, seed=7)
        result = run_campaign(p, stop, workers=4)
        tp = theory_point(p)
        board = scoreboard(result, tp)
        table[kappa, snr] = (tp, result, board)
        print(f"kappa={kappa:<6g} snr={snr:2d} dB  relay {result.ber_relay_hat:.3e} (theory {tp.ber_relay:.3e})"
              f"  end {result.ber_end_a_hat:.3e} (theory {tp.ber_end:.3e})  z={board.end_a.z:.2f}"
              f"{'  [cap hit]' if result.stop_rule_unreachable else ''}")

###############################################################################
# Plot, if matplotlib is around.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fine = np.linspace(0, 40, 161)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for kappa, color in zip(kappas, ["C0", "C1", "C2"]):
        theo = [theory_point(SystemParams.symmetric(s, kappa=kappa)) for s in fine]
        ax.semilogy(fine, [t.ber_end for t in theo], color=color, label=f"end-to-end, kappa={kappa:g}")
        ax.semilogy(fine, [t.ber_relay for t in theo], color=color, ls="--")
        sims = [table[kappa, s][1] for s in snr_db]
        ax.semilogy(snr_db, [r.ber_end_a_hat for r in sims], "o", color=color, mfc="none")
        ax.semilogy(snr_db, [r.ber_relay_hat for r in sims], "x", color=color)
        if kappa > 0:
            ax.axhline(error_floor(SystemParams.symmetric(sigma2=1.0, kappa=kappa)), color=color, ls=":")
            ax.axvline(float(linear_to_db(1 / regime_boundary(kappa))), color=color, lw=0.5)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.set_ylim(1e-6, 0.5)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.savefig("theory_vs_simulation.png", dpi=120, bbox_inches="tight")
    print("wrote theory_vs_simulation.png")
