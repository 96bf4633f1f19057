"""Slot-pipelined Monte Carlo of the single-slot two-way relay exchange.

In slot ``n`` the end nodes send fresh symbols while the relay sends the
network-coded version of what it decided in slot ``n-1``.  Each end node
decodes that relay symbol and strips its own slot ``n-1`` symbol off it to get
the partner's slot ``n-1`` symbol.  The relay is silent in slot 0 of every
batch, so end-to-end scoring starts at slot 1 while relay scoring starts at 0.

Two code paths implement this:

* :func:`step` advances a :class:`PipelineState` by one slot with scalars.
  It is the readable reference.
* :func:`run_batch` processes a whole batch with numpy.  The relay's own
  transmission feeds back into its receiver as self-interference, so decisions
  depend on earlier decisions.  The batch path starts from the guess "every
  relay decision was right" and re-evaluates only the slots whose transmitted
  symbol changed, until nothing changes.  Slot 0 is fixed and each pass
  settles at least one more slot, so this converges to exactly the slot-by-slot
  result.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channel import SILENT, ChannelState, draw_channel_state, draw_noise, endnode_rx, relay_rx
from .core import SystemParams, substream, validate
from .phy import endnode_detect, modulate, network_code, recover_partner, relay_joint_detect
from .theory import TheoryPoint

STOP_RULE_UNREACHABLE = "StopRuleUnreachable"
DEFAULT_BATCH_SIZE = 1 << 16


@dataclass(frozen=True)
class StopRule:
    min_errors: int = 200
    max_slots: int = 10**8

    def __post_init__(self):
        if self.min_errors < 1 or self.max_slots < 1:
            raise ValueError("min_errors and max_slots must both be >= 1")


@dataclass(frozen=True)
class SlotDraws:
    """All randomness consumed by a run of ``len(bits_a)`` slots."""

    bits_a: np.ndarray
    bits_b: np.ndarray
    channel: ChannelState
    noise_r: np.ndarray
    noise_a: np.ndarray
    noise_b: np.ndarray

    def __len__(self):
        return len(self.bits_a)

    def __getitem__(self, k):
        return SlotDraws(
            self.bits_a[k], self.bits_b[k], self.channel[k],
            self.noise_r[k], self.noise_a[k], self.noise_b[k],
        )


def draw_slots(params: SystemParams, rng: np.random.Generator, n: int) -> SlotDraws:
    bits = rng.integers(0, 2, size=(n, 2), dtype=np.int8)
    channel = draw_channel_state(rng, n)
    return SlotDraws(
        bits_a=bits[:, 0],
        bits_b=bits[:, 1],
        channel=channel,
        noise_r=draw_noise(params.noise_var_r, rng, n),
        noise_a=draw_noise(params.noise_var_a, rng, n),
        noise_b=draw_noise(params.noise_var_b, rng, n),
    )


@dataclass(frozen=True)
class PipelineState:
    """What carries over between slots.

    ``pending_*`` are the end nodes' own symbols from the previous slot, which
    are also the ground truth the partner's recovery is scored against.
    ``relay_tx`` is what the relay transmits in the coming slot.
    """

    pending_a: int = 0
    pending_b: int = 0
    relay_tx: int = SILENT
    slot: int = 0

    @property
    def warming_up(self) -> bool:
        return self.relay_tx == SILENT


class SlotFlags(NamedTuple):
    relay_err_a: bool
    relay_err_b: bool
    relay_nc_err: bool
    # None during warm-up
    relay_tx_wrong: bool | None
    bc_err_a: bool | None
    bc_err_b: bool | None
    end_err_a: bool | None
    end_err_b: bool | None


def step(state: PipelineState, params: SystemParams, draws: SlotDraws) -> tuple[PipelineState, SlotFlags]:
    """Advance the pipeline by one slot using that slot's pre-drawn randomness."""
    ch = draws.channel
    s_a = int(modulate(draws.bits_a))
    s_b = int(modulate(draws.bits_b))
    tx = state.relay_tx

    r_r = relay_rx(s_a, s_b, tx, ch, params, draws.noise_r)
    hyp = relay_joint_detect(r_r, ch.h_ar, ch.h_br, params.energy_a, params.energy_b)
    a_hat, b_hat = int(hyp.s_a), int(hyp.s_b)
    nc_err = int(network_code(a_hat, b_hat)) != int(network_code(s_a, s_b))

    tx_wrong = bc_a = bc_b = end_a = end_b = None
    if not state.warming_up:
        r_a = endnode_rx("A", tx, s_a, ch, params, draws.noise_a)
        r_b = endnode_rx("B", tx, s_b, ch, params, draws.noise_b)
        sr_at_a = int(endnode_detect(r_a, ch.h_ar, params.energy_r))
        sr_at_b = int(endnode_detect(r_b, ch.h_br, params.energy_r))
        tx_wrong = tx != int(network_code(state.pending_a, state.pending_b))
        bc_a, bc_b = sr_at_a != tx, sr_at_b != tx
        end_a = int(recover_partner(state.pending_a, sr_at_a)) != state.pending_b
        end_b = int(recover_partner(state.pending_b, sr_at_b)) != state.pending_a

    flags = SlotFlags(a_hat != s_a, b_hat != s_b, nc_err, tx_wrong, bc_a, bc_b, end_a, end_b)
    nxt = PipelineState(s_a, s_b, int(network_code(a_hat, b_hat)), state.slot + 1)
    return nxt, flags


def run_slot(state: PipelineState, params: SystemParams, rng: np.random.Generator):
    """Draw one slot of randomness from ``rng`` and :func:`step` through it."""
    return step(state, params, draw_slots(params, rng, 1)[0])


class BatchFlags(NamedTuple):
    """Per-slot indicators for one batch.

    Relay arrays cover every slot.  End-node arrays cover slots ``1..n-1``
    (index ``k`` here is slot ``k + 1``).
    """

    relay_err_a: np.ndarray
    relay_err_b: np.ndarray
    relay_nc_err: np.ndarray
    relay_tx_wrong: np.ndarray
    bc_err_a: np.ndarray
    bc_err_b: np.ndarray
    end_err_a: np.ndarray
    end_err_b: np.ndarray
    relay_tx: np.ndarray
    passes: int


def run_batch(params: SystemParams, draws: SlotDraws) -> BatchFlags:
    """Vectorized equivalent of stepping a fresh :class:`PipelineState` through ``draws``."""
    n = len(draws)
    ch = draws.channel
    s_a = modulate(draws.bits_a).astype(np.int64)
    s_b = modulate(draws.bits_b).astype(np.int64)
    true_nc = network_code(s_a, s_b)

    tx = np.zeros(n, dtype=np.int64)
    tx[1:] = true_nc[:-1]
    r_r = relay_rx(s_a, s_b, tx, ch, params, draws.noise_r)
    hyp = relay_joint_detect(r_r, ch.h_ar, ch.h_br, params.energy_a, params.energy_b)
    a_hat, b_hat = np.array(hyp.s_a), np.array(hyp.s_b)

    passes = 1
    while True:
        nc_hat = network_code(a_hat, b_hat)
        stale = np.flatnonzero(nc_hat[:-1] != tx[1:]) + 1
        if stale.size == 0:
            break
        passes += 1
        tx[stale] = nc_hat[stale - 1]
        r_r[stale] = relay_rx(s_a[stale], s_b[stale], tx[stale], ch[stale], params, draws.noise_r[stale])
        hyp = relay_joint_detect(r_r[stale], ch.h_ar[stale], ch.h_br[stale], params.energy_a, params.energy_b)
        a_hat[stale] = hyp.s_a
        b_hat[stale] = hyp.s_b

    r_a = endnode_rx("A", tx, s_a, ch, params, draws.noise_a)
    r_b = endnode_rx("B", tx, s_b, ch, params, draws.noise_b)
    sr_at_a = endnode_detect(r_a, ch.h_ar, params.energy_r)[1:]
    sr_at_b = endnode_detect(r_b, ch.h_br, params.energy_r)[1:]
    sent = tx[1:]

    return BatchFlags(
        relay_err_a=a_hat != s_a,
        relay_err_b=b_hat != s_b,
        relay_nc_err=nc_hat != true_nc,
        relay_tx_wrong=sent != true_nc[:-1],
        bc_err_a=sr_at_a != sent,
        bc_err_b=sr_at_b != sent,
        end_err_a=recover_partner(s_a[:-1], sr_at_a) != s_b[:-1],
        end_err_b=recover_partner(s_b[:-1], sr_at_b) != s_a[:-1],
        relay_tx=tx,
        passes=passes,
    )


@dataclass(frozen=True)
class BatchCounts:
    slots: int = 0
    batches: int = 0
    relay_nc_errors: int = 0
    relay_stream_errors_a: int = 0
    relay_stream_errors_b: int = 0
    end_errors_a: int = 0
    end_errors_b: int = 0

    def __add__(self, other):
        return BatchCounts(*(x + y for x, y in zip(self, other)))

    def __iter__(self):
        return iter((self.slots, self.batches, self.relay_nc_errors, self.relay_stream_errors_a,
                     self.relay_stream_errors_b, self.end_errors_a, self.end_errors_b))


def simulate_batch(params: SystemParams, batch_index: int, n_slots: int) -> BatchCounts:
    """Run batch ``batch_index`` on its own substream and count errors."""
    rng = substream(params.seed, batch_index)
    f = run_batch(params, draw_slots(params, rng, n_slots))
    return BatchCounts(
        slots=n_slots,
        batches=1,
        relay_nc_errors=int(f.relay_nc_err.sum()),
        relay_stream_errors_a=int(f.relay_err_a.sum()),
        relay_stream_errors_b=int(f.relay_err_b.sum()),
        end_errors_a=int(f.end_err_a.sum()),
        end_errors_b=int(f.end_err_b.sum()),
    )


def _binomial_stderr(k, n):
    if n == 0:
        return math.nan
    p = k / n
    return math.sqrt(p * (1 - p) / n)


@dataclass(frozen=True)
class SimResult:
    params: SystemParams
    counts: BatchCounts
    warnings: tuple[str, ...] = ()

    @property
    def seed(self):
        return self.params.seed

    @property
    def slots_run(self):
        return self.counts.slots

    @property
    def relay_scored(self):
        return self.counts.slots

    @property
    def end_scored(self):
        # one warm-up slot per batch
        return self.counts.slots - self.counts.batches

    @property
    def relay_nc_errors(self):
        return self.counts.relay_nc_errors

    @property
    def end_errors_a(self):
        return self.counts.end_errors_a

    @property
    def end_errors_b(self):
        return self.counts.end_errors_b

    def _ratio(self, k, n):
        return k / n if n else math.nan

    @property
    def ber_relay_hat(self):
        return self._ratio(self.relay_nc_errors, self.relay_scored)

    @property
    def ber_end_a_hat(self):
        return self._ratio(self.end_errors_a, self.end_scored)

    @property
    def ber_end_b_hat(self):
        return self._ratio(self.end_errors_b, self.end_scored)

    @property
    def stderr_relay(self):
        return _binomial_stderr(self.relay_nc_errors, self.relay_scored)

    @property
    def stderr_end_a(self):
        return _binomial_stderr(self.end_errors_a, self.end_scored)

    @property
    def stderr_end_b(self):
        return _binomial_stderr(self.end_errors_b, self.end_scored)

    @property
    def stop_rule_unreachable(self):
        return STOP_RULE_UNREACHABLE in self.warnings


def _done(c: BatchCounts, stop: StopRule) -> bool:
    return min(c.relay_nc_errors, c.end_errors_a, c.end_errors_b) >= stop.min_errors


def batch_schedule(batch_size: int, max_slots: int, first: int = 1024):
    """Yield ``(index, size)`` for every batch a campaign may run.

    Sizes grow linearly, ``first * (b + 1)``, up to ``batch_size`` so that
    high-BER points stop close to their error target instead of overshooting
    by a full batch.  The last batch is truncated at ``max_slots``.
    """
    start, b = 0, 0
    while start < max_slots:
        n = min(first * (b + 1), batch_size, max_slots - start)
        yield b, n
        start += n
        b += 1


def run_campaign(
    params: SystemParams,
    stop: StopRule = StopRule(),
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> SimResult:
    """Run batches until every metric has ``stop.min_errors`` errors or the slot cap is hit.

    Batch ``b`` always uses substream ``b`` with a size fixed by
    :func:`batch_schedule`, and the stopping point is decided in batch-index
    order, so the counters do not depend on ``workers``.  Batches computed
    beyond the stopping point are discarded.
    """
    validate(params)
    if workers < 1 or batch_size < 2:
        raise ValueError("workers must be >= 1 and batch_size >= 2")

    schedule = batch_schedule(batch_size, stop.max_slots)
    total = BatchCounts()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while not _done(total, stop):
            wave = list(itertools.islice(schedule, workers))
            if not wave:
                break
            jobs = [(params, b, n) for b, n in wave]
            if pool:
                results = pool.map(lambda job: simulate_batch(*job), jobs)
            else:
                results = (simulate_batch(*job) for job in jobs)
            for counts in results:
                if _done(total, stop):
                    break
                total = total + counts
    finally:
        if pool:
            pool.shutdown()

    warnings = () if _done(total, stop) else (STOP_RULE_UNREACHABLE,)
    return SimResult(params=params, counts=total, warnings=warnings)


@dataclass(frozen=True)
class MetricScore:
    estimate: float
    stderr: float
    theory: float
    z: float
    rel_dev: float
    passed: bool


@dataclass(frozen=True)
class Scoreboard:
    relay: MetricScore
    end_a: MetricScore
    end_b: MetricScore
    threshold: float = 3.0
    metrics: tuple[str, ...] = field(default=("relay", "end_a", "end_b"), repr=False)

    @property
    def passed(self) -> bool:
        return all(getattr(self, m).passed for m in self.metrics)


def score_metric(estimate, stderr, theory, threshold=3.0) -> MetricScore:
    dev = abs(estimate - theory)
    if stderr > 0:
        z = dev / stderr
    else:
        z = 0.0 if dev == 0 else math.inf
    rel = dev / theory if theory > 0 else (0.0 if dev == 0 else math.inf)
    return MetricScore(estimate, stderr, theory, z, rel, bool(z <= threshold))


def scoreboard(result: SimResult, theory: TheoryPoint, threshold: float = 3.0) -> Scoreboard:
    """z-test of each simulated BER against its closed form."""
    return Scoreboard(
        relay=score_metric(result.ber_relay_hat, result.stderr_relay, theory.ber_relay, threshold),
        end_a=score_metric(result.ber_end_a_hat, result.stderr_end_a, theory.ber_end, threshold),
        end_b=score_metric(result.ber_end_b_hat, result.stderr_end_b, theory.ber_end_b, threshold),
        threshold=threshold,
    )
