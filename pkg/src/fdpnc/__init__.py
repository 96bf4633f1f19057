"""Link-level simulator and closed-form BER engine for full-duplex
physical-layer network coding on the two-way relay channel."""

from .core import SystemParams, ValidationError, db_to_linear, linear_to_db, substream, validate
from .sim import SimResult, StopRule, run_campaign, scoreboard
from .theory import (
    TheoryPoint,
    ber_end_to_end,
    ber_relay,
    ber_relay_stream,
    error_floor,
    q_function,
    regime,
    slots_per_exchange,
    theory_point,
    time_savings,
)

__version__ = "0.1.0"
