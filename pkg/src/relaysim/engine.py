"""Episode orchestration: pre-training, data transmission, and sweeps.

One episode runs a strictly sequential slot loop: draw a channel
realization, select relays (and beams) for the slot, apply the buffer
updates, and account packets.  Pre-training runs the same loop from
half-full buffers while adapting the selection weights alpha; the data
phase starts from empty buffers with alpha frozen and tracks a FIFO packet
queue per relay for delay statistics.

Sweeps fan episodes out over (scheme, sweep point, repetition).  All
schemes at a given (point, repetition) share the same channel random
stream, so scheme comparisons are paired; everything is seeded from a
single root via spawn keys, making every number in the output a pure
function of (config, seed).
"""

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from relaysim import channel
from relaysim.errors import ConfigError, DegenerateInputError
from relaysim.linalg import random_orthonormal_pair
from relaysim.rates import BufferState, apply_slot
from relaysim.selection import (
    ALL_SCHEMES,
    PAIR_SCHEMES,
    alpha_update_backpressure,
    alpha_update_subgradient,
    backpressure_weights,
    initial_alpha,
    select_hd_brs,
    select_hd_mlrs,
    select_hd_mmrs,
    select_pair,
    select_sfd_mmrs,
)

#: pre-training buffer fill when B_max is infinite (half of a buffer size
#: empirically sufficient for unthrottled operation at the SNRs studied)
_INFINITE_BMAX_PRETRAIN_FILL = 25.0


@dataclass
class PacketRecord:
    """One source packet queued at a relay, drained FIFO and possibly split
    across several transmit slots."""

    arrival_slot: int
    size: float
    remaining: float
    relay: int


@dataclass(frozen=True)
class EpisodeMetrics:
    """Aggregates of one data-phase episode.

    avg_delay averages completed packets only (packets still buffered at the
    end are censored); delay_defined is False for the bufferless HD-BRS
    benchmark, whose packets never wait.  flow_residual is the conservation
    defect received-bits - delivered-bits - buffered-bits, which should be
    zero up to float rounding.
    """

    avg_rate_d: float
    avg_rate_s: float
    avg_delay: float
    slots: int
    delay_defined: bool
    flow_residual: float
    completed_packets: int
    final_buffer_bits: float
    trace: list = None


def _rngs_from_config(config, rng, rng_scheme):
    if rng is None:
        root = np.random.SeedSequence(config.seed)
        streams = root.spawn(2)
        rng = np.random.default_rng(streams[0])
        if rng_scheme is None:
            rng_scheme = np.random.default_rng(streams[1])
    elif rng_scheme is None:
        rng_scheme = np.random.default_rng(0)
    return rng, rng_scheme


def _pretrain_buffers(config):
    if math.isinf(config.b_max):
        fill = _INFINITE_BMAX_PRETRAIN_FILL
    else:
        fill = config.b_max / 2.0
    return BufferState(np.full(config.n_relays, fill), b_max=config.b_max)


def _slot_decision(scheme, chan, buf, alpha, config, rng_scheme, slot):
    if scheme in PAIR_SCHEMES:
        basis = None
        if scheme == "ob":
            basis = random_orthonormal_pair(config.n_antennas, rng_scheme)
        try:
            return select_pair(scheme, chan, buf, alpha, config, ob_basis=basis)
        except ValueError as err:
            if scheme == "ob" and "singular" in str(err):
                basis = random_orthonormal_pair(config.n_antennas, rng_scheme)
                try:
                    return select_pair(scheme, chan, buf, alpha, config,
                                       ob_basis=basis)
                except ValueError:
                    raise DegenerateInputError("singular inter-relay channel")
            raise
    if scheme == "hd_brs":
        return select_hd_brs(chan, config)
    if scheme == "hd_mmrs":
        return select_hd_mmrs(chan, buf, config, slot)
    if scheme == "hd_mlrs":
        return select_hd_mlrs(chan, buf, config)
    if scheme == "sfd_mmrs":
        return select_sfd_mmrs(chan, buf, config, with_iri=False)
    if scheme == "sfd_mmrs_iri":
        return select_sfd_mmrs(chan, buf, config, with_iri=True)
    raise ConfigError(f"unknown scheme '{scheme}'")


def _apply_decision(buf, decision, k):
    # route through the single buffer-mutation point; an idle role becomes a
    # zero-rate transfer at a dummy partner index
    i, j = decision.i, decision.j
    if i is not None and j is not None:
        return apply_slot(buf, i, decision.c_s, j, decision.c_d)
    if i is not None:
        return apply_slot(buf, i, decision.c_s, (i + 1) % k, 0.0)
    return apply_slot(buf, (j + 1) % k, 0.0, j, decision.c_d)


def run_pretraining(scheme, config, alpha_mode="subgradient", slots=5000,
                    rng=None, rng_scheme=None):
    """Adapt the selection weights alpha over a pre-training phase.

    In subgradient mode the buffer state is held at its half-full reference
    throughout, so the adaptation tracks the imbalance of the scheme's
    *link rates* rather than transient buffer flows (with evolving buffers,
    flow conservation drives the drift signal to zero at any alpha, and
    alpha would freeze wherever the initial transient left it).

    In back-pressure mode the buffers evolve under the selected decisions:
    each slot is selected with the instantaneous max-weight ratios
    clip(1 - B_k/B_S, 0, 1) as its weights, the virtual source backlog B_S
    is fixed at twice the initial fill (so the initial ratio is exactly
    1/2), and the reported alpha is the running time average of those
    ratios.  Benchmark schemes do not use alpha and return the
    uninformative initial state untouched.
    """
    k = config.n_relays
    if scheme not in PAIR_SCHEMES:
        return initial_alpha(k)
    if alpha_mode not in ("subgradient", "backpressure"):
        raise ConfigError(f"unknown alpha_mode '{alpha_mode}'")
    rng, rng_scheme = _rngs_from_config(config, rng, rng_scheme)
    buf = _pretrain_buffers(config)
    state = initial_alpha(k)
    if alpha_mode == "backpressure":
        state = replace(state, virtual_source_b=2.0 * float(buf.levels[0]))
        for t in range(slots):
            chan = channel.draw(config, rng)
            weights = replace(
                state, alpha=backpressure_weights(buf, state.virtual_source_b)
            )
            decision = _slot_decision(scheme, chan, buf, weights, config,
                                      rng_scheme, t)
            buf = _apply_decision(buf, decision, k)
            state = alpha_update_backpressure(state, buf, decision, t)
        return state
    for t in range(slots):
        chan = channel.draw(config, rng)
        decision = _slot_decision(scheme, chan, buf, state, config,
                                  rng_scheme, t)
        state = alpha_update_subgradient(state, decision, t)
    return state


def _drain_queue(queue, amount, slot, delays):
    while queue and amount > 1e-12:
        pkt = queue[0]
        take = pkt.remaining if pkt.remaining < amount else amount
        pkt.remaining -= take
        amount -= take
        if pkt.remaining <= 1e-12:
            queue.popleft()
            delays.append(slot - pkt.arrival_slot)


def run_episode(scheme, config, alpha=None, slots=10000, rng=None,
                rng_scheme=None, collect_trace=False):
    """Run one data-phase episode and aggregate its metrics.

    Buffers start empty.  Each slot the source emits one packet of size
    equal to the realized receive rate C_S (none when C_S=0) into the
    receiving relay's FIFO queue; the transmitting relay drains its queue by
    C_D bits, splitting packets across slots as needed.  Delay of a packet
    is completion slot minus arrival slot.
    """
    k = config.n_relays
    if alpha is None:
        alpha = initial_alpha(k)
    rng, rng_scheme = _rngs_from_config(config, rng, rng_scheme)
    bufferless = scheme == "hd_brs"
    buf = BufferState(np.zeros(k), b_max=config.b_max)
    queues = [deque() for _ in range(k)]
    delays = []
    total_s = 0.0
    total_d = 0.0
    trace = [] if collect_trace else None
    for t in range(slots):
        chan = channel.draw(config, rng)
        decision = _slot_decision(scheme, chan, buf, alpha, config,
                                  rng_scheme, t)
        if bufferless:
            total_s += decision.c_s
            total_d += decision.c_d
        else:
            buf = _apply_decision(buf, decision, k)
            if decision.i is not None:
                total_s += decision.c_s
                if decision.c_s > 0.0:
                    queues[decision.i].append(
                        PacketRecord(t, decision.c_s, decision.c_s, decision.i)
                    )
            if decision.j is not None:
                total_d += decision.c_d
                if decision.c_d > 0.0:
                    _drain_queue(queues[decision.j], decision.c_d, t, delays)
        if collect_trace:
            trace.append((decision.i, decision.j, decision.c_s, decision.c_d,
                          buf.levels.copy()))
    buffered = float(np.sum(buf.levels))
    residual = total_s - total_d - (0.0 if bufferless else buffered)
    avg_delay = float(np.mean(delays)) if delays else 0.0
    return EpisodeMetrics(
        avg_rate_d=total_d / slots,
        avg_rate_s=total_s / slots,
        avg_delay=avg_delay,
        slots=slots,
        delay_defined=not bufferless,
        flow_residual=residual,
        completed_packets=len(delays),
        final_buffer_bits=buffered,
        trace=trace,
    )


SWEEP_AXES = ("snr", "antennas", "relays", "buffer_size", "iri_variance")


def _uniform_scalar(arr, what):
    first = arr.flat[0]
    if not np.all(arr == first):
        raise ConfigError(f"sweeping relays needs uniform {what}")
    return float(first)


def resolve_config(config, axis, point):
    """Apply one sweep-axis value to a base NetworkConfig."""
    if axis == "snr":
        rho = 10.0 ** (point / 10.0)
        return replace(config, rho_s=rho, rho_r=rho)
    if axis == "antennas":
        return replace(config, n_antennas=int(point))
    if axis == "relays":
        k = int(point)
        off_diag = config.var_rr[~np.eye(config.n_relays, dtype=bool)]
        return channel.NetworkConfig(
            n_relays=k,
            n_antennas=config.n_antennas,
            rho_s=config.rho_s,
            rho_r=config.rho_r,
            var_sr=_uniform_scalar(config.var_sr, "source-relay variances"),
            var_rd=_uniform_scalar(config.var_rd, "relay-destination variances"),
            var_rr=_uniform_scalar(off_diag, "inter-relay variances"),
            b_max=config.b_max,
            seed=config.seed,
        )
    if axis == "buffer_size":
        return replace(config, b_max=float(point))
    if axis == "iri_variance":
        return replace(config, var_rr=10.0 ** (point / 10.0))
    raise ConfigError(f"unknown sweep axis '{axis}'")


def _run_cell(task):
    (scheme, config, axis, point_idx, point, rep, root_seed, slots,
     pretrain_slots, alpha_mode) = task
    cfg = resolve_config(config, axis, point)
    seq = np.random.SeedSequence(root_seed, spawn_key=(point_idx, rep))
    streams = [np.random.default_rng(s) for s in seq.spawn(4)]
    state = run_pretraining(scheme, cfg, alpha_mode, pretrain_slots,
                            rng=streams[0], rng_scheme=streams[1])
    metrics = run_episode(scheme, cfg, state, slots,
                          rng=streams[2], rng_scheme=streams[3])
    if scheme in PAIR_SCHEMES:
        a_mean = float(np.mean(state.alpha))
        a_min = float(np.min(state.alpha))
        a_max = float(np.max(state.alpha))
    else:
        a_mean = a_min = a_max = float("nan")
    return {
        "scheme": scheme,
        "axis": axis,
        "point": point,
        "rep": rep,
        "seed": root_seed,
        "slots": slots,
        "avg_rate_d": metrics.avg_rate_d,
        "avg_rate_s": metrics.avg_rate_s,
        "avg_delay": metrics.avg_delay,
        "delay_defined": metrics.delay_defined,
        "flow_residual": metrics.flow_residual,
        "alpha_mean": a_mean,
        "alpha_min": a_min,
        "alpha_max": a_max,
    }


def _stderr(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def run_sweep(schemes, axis, points, config, repetitions=3, slots=10000,
              pretrain_slots=5000, alpha_mode="subgradient", threads=None,
              seed=None):
    """Run every (scheme, point, repetition) episode and tabulate results.

    Returns one row dict per repetition, each also carrying its
    (scheme, point) group's across-repetition mean and standard error.  All
    schemes share channel randomness at equal (point, repetition), so
    between-scheme differences are paired comparisons.
    """
    if not points:
        raise ConfigError("sweep needs at least one point")
    for scheme in schemes:
        if scheme not in ALL_SCHEMES:
            raise ConfigError(f"unknown scheme '{scheme}'")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis '{axis}'")
    root_seed = seed
    if root_seed is None:
        root_seed = config.seed if config.seed is not None else 0
    tasks = [
        (scheme, config, axis, point_idx, point, rep, root_seed, slots,
         pretrain_slots, alpha_mode)
        for point_idx, point in enumerate(points)
        for scheme in schemes
        for rep in range(repetitions)
    ]
    if threads is not None and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_cell, tasks))
    else:
        rows = [_run_cell(task) for task in tasks]
    groups = {}
    for row in rows:
        groups.setdefault((row["scheme"], row["point"]), []).append(row)
    for members in groups.values():
        for field in ("avg_rate_d", "avg_rate_s", "avg_delay"):
            values = [m[field] for m in members]
            mean = float(np.mean(values))
            err = _stderr(values)
            for m in members:
                m[field + "_mean"] = mean
                m[field + "_stderr"] = err
    return rows
