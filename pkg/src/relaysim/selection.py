"""Per-slot relay selection for every scheme, and the two alpha adaptations.

The five joint selection+beamforming schemes and the ideal upper bound pick
an ordered relay pair (i receives from the source, j transmits to the
destination) maximizing the weighted buffer-capped objective
alpha[i]*C_S + (1-alpha[j])*C_D over all K(K-1) candidates.  The four
benchmark schemes (HD-BRS, HD-MMRS, HD-MLRS, SFD-MMRS) reproduce classic
relay selection rules for comparison; the half-duplex ones carry the 1/2
pre-log penalty.

The per-relay weights alpha come either from a subgradient update of the
buffer-stability dual variables or from a back-pressure rule driven by a
virtual source queue; both are adapted during a pre-training phase (see
relaysim.engine) and then frozen.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from relaysim import kernels
from relaysim.beamforming import BeamformerResult

#: selection schemes that pick an ordered (receive, transmit) relay pair
PAIR_SCHEMES = ("ideal", "sinr", "zf", "mmse", "ob", "optimal")

#: benchmark schemes with their own selection rules
BENCHMARK_SCHEMES = ("hd_brs", "hd_mmrs", "hd_mlrs", "sfd_mmrs", "sfd_mmrs_iri")

ALL_SCHEMES = PAIR_SCHEMES + BENCHMARK_SCHEMES

_SCHEME_CODE = {
    "ideal": kernels.SCHEME_IDEAL,
    "sinr": kernels.SCHEME_SINR,
    "zf": kernels.SCHEME_ZF,
    "mmse": kernels.SCHEME_MMSE,
    "ob": kernels.SCHEME_OB,
    "optimal": kernels.SCHEME_OPTIMAL,
}


@dataclass(frozen=True)
class PairDecision:
    """One slot's selection outcome.

    i is the receiving relay, j the transmitting relay; benchmark schemes
    with a single active relay per slot leave the unused role at None.
    c_s and c_d are the realized buffer-capped rates (bits/channel-use) of
    the two hops; bf is None for the benchmark schemes, which fix their
    beams to MRC/MRT implicitly.
    """

    i: int
    j: int
    c_s: float
    c_d: float
    bf: BeamformerResult = None
    objective: float = 0.0


def default_step_schedule(slot):
    """Diminishing subgradient step, 0.1/sqrt(1 + t/100)."""
    return 0.1 / math.sqrt(1.0 + slot / 100.0)


@dataclass(frozen=True)
class AlphaState:
    """Per-relay selection weights and the state of their adaptation.

    alpha[k] weights relay k's receive rate when k is the receive candidate;
    (1-alpha[k]) weights its transmit rate.  delta tracks the exponentially
    weighted buffer drift used by the subgradient update; virtual_source_b,
    cbar_d and updates belong to the back-pressure update (virtual source
    queue, smoothed delivered rate, and the running-average counter).
    """

    alpha: np.ndarray
    delta: np.ndarray
    lambda_forget: float = 0.99
    step_schedule: object = default_step_schedule
    virtual_source_b: float = 0.0
    cbar_d: float = 0.0
    updates: int = 0

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64).copy()
        if np.any(alpha < 0.0) or np.any(alpha > 1.0):
            raise ValueError(f"alpha outside [0,1]: {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(
            self, "delta", np.asarray(self.delta, dtype=np.float64).copy()
        )


def initial_alpha(k):
    """Fresh AlphaState with all weights at the uninformative 0.5."""
    return AlphaState(alpha=np.full(k, 0.5), delta=np.zeros(k))


def select_pair(scheme, chan, buf, alpha, config, ob_basis=None):
    """Exhaustive search over ordered relay pairs for one slot.

    Evaluates the scheme's beamformer for all K(K-1) ordered pairs (i, j),
    i != j, and returns the pair maximizing alpha[i]*C_S + (1-alpha[j])*C_D
    with buffer-capped rates.  Ties keep the smallest (i, then j); when all
    objectives are zero this degenerates to pair (0, 1), a zero-rate slot.

    The ob scheme needs the slot's pre-agreed orthonormal basis (u, q),
    shared by all candidate pairs, passed as ob_basis.
    """
    code = _SCHEME_CODE[scheme]
    if code == kernels.SCHEME_OB:
        if ob_basis is None:
            raise ValueError("ob scheme needs the slot's (u, q) basis")
        ob_u, ob_q = ob_basis
    else:
        ob_u = ob_q = None
    i, j, gs, gd, c_s, c_d, obj, u, w, iters, beta = kernels.best_pair(
        code,
        chan.h_sr,
        chan.h_rd,
        chan.h_rr,
        config.rho_s,
        config.rho_r,
        alpha.alpha,
        buf.levels,
        buf.b_max,
        ob_u=ob_u,
        ob_q=ob_q,
    )
    bf = BeamformerResult(
        u=u,
        w=w,
        gamma_s=float(gs),
        gamma_d=float(gd),
        iterations=int(iters),
        beta=None if beta < 0.0 else float(beta),
    )
    return PairDecision(
        i=int(i), j=int(j), c_s=float(c_s), c_d=float(c_d), bf=bf,
        objective=float(obj),
    )


def alpha_update_subgradient(state, decision, slot):
    """One subgradient step on the buffer-stability dual variables.

    The drift estimate is an exponentially weighted inflow-outflow
    difference per relay: delta[k] <- lambda*delta[k]
    + (1-lambda)*(C_S*[k=i] - C_D*[k=j]); the weights then move against the
    drift with a diminishing step and are projected back onto [0,1].
    """
    lam = state.lambda_forget
    delta = lam * state.delta
    inc = 1.0 - lam
    if decision.i is not None:
        delta[decision.i] += inc * decision.c_s
    if decision.j is not None:
        delta[decision.j] -= inc * decision.c_d
    mu = state.step_schedule(slot)
    alpha = np.clip(state.alpha - mu * delta, 0.0, 1.0)
    return replace(state, alpha=alpha, delta=delta)


def backpressure_weights(buf, virtual_source_b):
    """Instantaneous max-weight ratios clip(1 - B[k]/B_S, 0, 1).

    A relay with an empty buffer gets weight 1 (favor reception), a relay
    holding B_S bits or more gets weight 0 (favor transmission); the pair
    objective alpha[i]*C_S + (1-alpha[j])*C_D then implements max-weight
    matching against the virtual source backlog B_S.
    """
    return np.clip(1.0 - buf.levels / virtual_source_b, 0.0, 1.0)


def alpha_update_backpressure(state, buf, decision, slot):
    """Back-pressure weight accumulation against a virtual source queue.

    The virtual source backlog B_S is a fixed reference level (set by the
    caller, e.g. twice the initial buffer fill); alpha[k] is the running
    time average of the instantaneous ratios clip(1 - B[k]/B_S, 0, 1) that
    drive the per-slot selection.  A smoothed delivered rate (forgetting
    factor lambda on C_D) is tracked alongside as a convergence diagnostic.
    """
    lam = state.lambda_forget
    c_d = decision.c_d if decision.j is not None else 0.0
    cbar_d = lam * state.cbar_d + (1.0 - lam) * c_d
    inst = backpressure_weights(buf, state.virtual_source_b)
    n = state.updates + 1
    alpha = state.alpha + (inst - state.alpha) / n
    return replace(state, alpha=alpha, cbar_d=cbar_d, updates=n)


def _half_rate(gamma):
    return 0.5 * math.log2(1.0 + gamma)


def select_hd_brs(chan, config):
    """Best-relay selection for bufferless half-duplex relaying.

    Picks the relay maximizing min of the two half-rates; the delivered
    end-to-end rate of the slot is that min itself (no queueing), reported
    in both c_s and c_d.  The single active relay is reported as i with
    j=None (it serves both hops itself).
    """
    gs, gd = kernels.mrc_mrt_gains(chan.h_sr, chan.h_rd, config.rho_s, config.rho_r)
    best_i = 0
    best_rate = -1.0
    for k in range(chan.h_sr.shape[0]):
        rate = min(_half_rate(gs[k]), _half_rate(gd[k]))
        if rate > best_rate:
            best_rate = rate
            best_i = k
    return PairDecision(i=best_i, j=None, c_s=best_rate, c_d=best_rate,
                        objective=best_rate)


def select_hd_mmrs(chan, buf, config, slot_parity):
    """Max-max relay selection: alternate receive and transmit slots.

    Even slots pick the best receiving relay by buffer-capped half-rate,
    odd slots the best transmitting relay; the other role stays idle.
    """
    gs, gd = kernels.mrc_mrt_gains(chan.h_sr, chan.h_rd, config.rho_s, config.rho_r)
    k_relays = chan.h_sr.shape[0]
    best_k = 0
    best_rate = -1.0
    if slot_parity % 2 == 0:
        for k in range(k_relays):
            rate = min(_half_rate(gs[k]), max(buf.headroom(k), 0.0))
            if rate > best_rate:
                best_rate = rate
                best_k = k
        return PairDecision(i=best_k, j=None, c_s=best_rate, c_d=0.0,
                            objective=best_rate)
    for k in range(k_relays):
        rate = min(_half_rate(gd[k]), buf.levels[k])
        if rate > best_rate:
            best_rate = rate
            best_k = k
    return PairDecision(i=None, j=best_k, c_s=0.0, c_d=best_rate,
                        objective=best_rate)


def select_hd_mlrs(chan, buf, config):
    """Max-link selection: best of the 2K buffer-capped half-duplex links.

    Enumerates every receive link then every transmit link and activates the
    single best one; ties keep the first candidate in that order.
    """
    gs, gd = kernels.mrc_mrt_gains(chan.h_sr, chan.h_rd, config.rho_s, config.rho_r)
    k_relays = chan.h_sr.shape[0]
    best = None
    best_rate = -1.0
    for k in range(k_relays):
        rate = min(_half_rate(gs[k]), max(buf.headroom(k), 0.0))
        if rate > best_rate:
            best_rate = rate
            best = ("rx", k)
    for k in range(k_relays):
        rate = min(_half_rate(gd[k]), buf.levels[k])
        if rate > best_rate:
            best_rate = rate
            best = ("tx", k)
    if best[0] == "rx":
        return PairDecision(i=best[1], j=None, c_s=best_rate, c_d=0.0,
                            objective=best_rate)
    return PairDecision(i=None, j=best[1], c_s=0.0, c_d=best_rate,
                        objective=best_rate)


def _best_two(values):
    # indices of the largest and second-largest entries, first index wins ties
    b1 = 0
    for k in range(1, len(values)):
        if values[k] > values[b1]:
            b1 = k
    b2 = None
    for k in range(len(values)):
        if k == b1:
            continue
        if b2 is None or values[k] > values[b2]:
            b2 = k
    return b1, b2


def select_sfd_mmrs(chan, buf, config, with_iri=False):
    """Space full-duplex max-max selection with the conflict rule.

    Picks the best receiving and best transmitting relay by buffer-capped
    full rate under IRI-free beams.  When the same relay wins both roles,
    the second-best candidates compete: take (i2, j1) if
    min(C_S[i2], C_D[j1]) beats min(C_S[i1], C_D[j2]), else (i1, j2).

    With with_iri=True the realized receive rate is recomputed with the
    interference the selected transmitting relay actually causes; the
    selection itself still ignores it (the scheme is unaware of the leak).
    """
    gs, gd = kernels.mrc_mrt_gains(chan.h_sr, chan.h_rd, config.rho_s, config.rho_r)
    k_relays = chan.h_sr.shape[0]
    c_s = [min(math.log2(1.0 + gs[k]), max(buf.headroom(k), 0.0))
           for k in range(k_relays)]
    c_d = [min(math.log2(1.0 + gd[k]), buf.levels[k]) for k in range(k_relays)]
    i1, i2 = _best_two(c_s)
    j1, j2 = _best_two(c_d)
    if i1 != j1:
        i, j = i1, j1
    elif min(c_s[i2], c_d[j1]) > min(c_s[i1], c_d[j2]):
        i, j = i2, j1
    else:
        i, j = i1, j2
    rate_s = c_s[i]
    if with_iri:
        gamma_s, _ = kernels.iri_free_pair(
            chan.h_sr[i], chan.h_rd[j], chan.h_rr[j, i],
            config.rho_s, config.rho_r, True,
        )
        rate_s = min(math.log2(1.0 + gamma_s), max(buf.headroom(i), 0.0))
    return PairDecision(i=i, j=j, c_s=rate_s, c_d=c_d[j],
                        objective=min(rate_s, c_d[j]))
