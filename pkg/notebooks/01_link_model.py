"""
One slot of the full-duplex relay link
======================================

Walk a handful of slots through the pipeline by hand: what the relay hears,
what it decides, what it sends one slot later, and how each end node gets its
partner's bit back.
"""

import numpy as np

from fdpnc.channel import SILENT, draw_channel_state, endnode_rx, relay_rx
from fdpnc.core import SystemParams, substream
from fdpnc.phy import endnode_detect, modulate, network_code, recover_partner, relay_joint_detect
from fdpnc.sim import PipelineState, run_slot

###############################################################################
# A 15 dB link with a little residual self-interference everywhere.

params = SystemParams.symmetric(15.0, kappa=0.05, seed=1)
rng = substream(params.seed, 0)

###############################################################################
# Slot 0: the relay has nothing to forward yet, so it stays silent.

ch = draw_channel_state(rng)
s_a, s_b = modulate(1), modulate(0)
r = relay_rx(s_a, s_b, SILENT, ch, params, rng)
hyp = relay_joint_detect(r, ch.h_ar, ch.h_br)
print(f"sent ({s_a:+d}, {s_b:+d})  relay decided ({hyp.s_a:+d}, {hyp.s_b:+d})  metric {hyp.metric:.3f}")

###############################################################################
# Slot 1: the relay broadcasts the modulated XOR of its slot-0 decision while
# A and B already send their next symbols.  A knows its own slot-0 symbol and
# strips it off.

relay_symbol = network_code(hyp.s_a, hyp.s_b)
ch = draw_channel_state(rng)
r_a = endnode_rx("A", relay_symbol, modulate(0), ch, params, rng)
heard = endnode_detect(r_a, ch.h_ar)
print(f"A heard relay symbol {heard:+d}, recovers B's bit as {recover_partner(s_a, heard):+d} (truth {s_b:+d})")

###############################################################################
# The same thing with the simulator's state machine, for ten slots.

state = PipelineState()
for _ in range(10):
    state, flags = run_slot(state, params, rng)
    print(f"slot {state.slot - 1}: relay err {flags.relay_nc_err!s:5}  end err A {flags.end_err_a}")
