"""Receive/transmit beamformer design for a candidate relay pair.

Six strategies, all returning unit-norm (u, w) plus the resulting effective
SINRs for one source->relay-i / relay-j->destination slot:

  bf_iri_free  MRC/MRT, designed as if there were no inter-relay leak; the
               reported gamma_S can include the leak the pair actually causes
               (the SINR-based scheme) or not (the ideal upper bound).
  bf_zf        MRC receive; transmit projected onto the null space of the
               effective leak direction g = H^H u.
  bf_mmse      MRT transmit; receive direction solves the rank-one MMSE
               problem against the leak covariance.
  bf_ob        pre-agreed random orthonormal (u, q); transmit steered through
               H^{-1} q so the leak lands orthogonal to u.
  bf_optimal   alternating optimization of both beams for a weighted
               two-hop rate objective.

The numerical work is delegated to relaysim.kernels (compiled when
available); this module owns input validation and the error taxonomy.
"""

import math
from dataclasses import dataclass

import numpy as np

from relaysim import kernels
from relaysim.errors import (
    DegenerateInputError,
    DimensionError,
    UnsupportedConfigError,
)
from relaysim.linalg import random_orthonormal_pair
from relaysim.rates import inst_rate_receive, inst_rate_transmit


@dataclass(frozen=True)
class BeamformerResult:
    """Unit-norm beam pair and the effective per-hop SINRs it produces.

    iterations and beta are populated by bf_optimal only (count of
    alternating steps and the final transmit split); other strategies leave
    them at 0 and None.
    """

    u: np.ndarray
    w: np.ndarray
    gamma_s: float
    gamma_d: float
    iterations: int = 0
    beta: float = None


def _validated(h_s, h_d, big_h):
    h_s = np.ascontiguousarray(h_s, dtype=np.complex128)
    h_d = np.ascontiguousarray(h_d, dtype=np.complex128)
    big_h = np.ascontiguousarray(big_h, dtype=np.complex128)
    if h_s.ndim != 1 or h_d.ndim != 1:
        raise DimensionError("channel vectors must be 1-D")
    m = h_s.shape[0]
    if h_d.shape[0] != m:
        raise DimensionError(
            f"receive/transmit channels disagree on antennas: {m} vs {h_d.shape[0]}"
        )
    if big_h.shape != (m, m):
        raise DimensionError(
            f"inter-relay channel must be {(m, m)}, got {big_h.shape}"
        )
    return h_s, h_d, big_h, m


def _check_nonzero(h_s, h_d):
    if not np.any(h_s) or not np.any(h_d):
        raise DegenerateInputError("zero channel vector")


def bf_iri_free(h_s, h_d, big_h, rho_s, rho_r, include_iri=True):
    """MRC/MRT pair, designed ignoring the inter-relay leak.

    With include_iri=True the reported gamma_s still accounts for the leak
    this naive pair causes (the SINR-based selection scheme); with False the
    leak is ignored outright, which is the ideal full-duplex upper bound.
    """
    h_s, h_d, big_h, m = _validated(h_s, h_d, big_h)
    _check_nonzero(h_s, h_d)
    gs, gd = kernels.iri_free_pair(h_s, h_d, big_h, rho_s, rho_r, include_iri)
    u = h_s / np.linalg.norm(h_s)
    w = h_d / np.linalg.norm(h_d)
    return BeamformerResult(u=u, w=w, gamma_s=float(gs), gamma_d=float(gd))


def bf_zf(h_s, h_d, big_h, rho_s, rho_r):
    """MRC receive; transmit null-steered so the receiving relay sees no leak.

    The receive hop keeps its full array gain (gamma_s = rho_s ||h_s||^2);
    the transmit hop pays the projection loss.  Needs M >= 2 for the null
    space to be nonempty; a zero effective leak direction makes the
    constraint vacuous and the transmit beam falls back to MRT.
    """
    h_s, h_d, big_h, m = _validated(h_s, h_d, big_h)
    if m < 2:
        raise UnsupportedConfigError("null-steering transmit needs M >= 2")
    _check_nonzero(h_s, h_d)
    gs, gd, u, w = kernels.zf_pair(h_s, h_d, big_h, rho_s, rho_r)
    return BeamformerResult(u=u, w=w, gamma_s=float(gs), gamma_d=float(gd))


def bf_mmse(h_s, h_d, big_h, rho_s, rho_r):
    """MRT transmit; receive beam maximizes SINR against the rank-one leak.

    The transmit hop keeps its full array gain (gamma_d = rho_r ||h_d||^2);
    the receive side trades a little signal energy for leak suppression.
    """
    h_s, h_d, big_h, m = _validated(h_s, h_d, big_h)
    _check_nonzero(h_s, h_d)
    gs, gd, u, w = kernels.mmse_pair(h_s, h_d, big_h, rho_s, rho_r)
    return BeamformerResult(u=u, w=w, gamma_s=float(gs), gamma_d=float(gd))


def bf_ob(h_s, h_d, big_h, rho_s, rho_r, rng):
    """Random pre-agreed orthonormal basis: receive on u, transmit H^{-1} q.

    By construction u^H H w = u^H q = 0 for any channel draw, so no
    instantaneous CSI for H is needed, at the price of forgoing all array
    gain.  A numerically singular H gets one fresh draw of the basis before
    giving up.
    """
    h_s, h_d, big_h, m = _validated(h_s, h_d, big_h)
    if m < 2:
        raise UnsupportedConfigError("orthonormal-basis scheme needs M >= 2")
    _check_nonzero(h_s, h_d)
    u, q = random_orthonormal_pair(m, rng)
    gs, gd, w, singular = kernels.ob_pair(h_s, h_d, big_h, u, q, rho_s, rho_r)
    if singular:
        u, q = random_orthonormal_pair(m, rng)
        gs, gd, w, singular = kernels.ob_pair(h_s, h_d, big_h, u, q, rho_s, rho_r)
        if singular:
            raise DegenerateInputError("singular inter-relay channel")
    return BeamformerResult(u=u, w=w, gamma_s=float(gs), gamma_d=float(gd))


def optimal_beta_objective(beta, a, p, d_par, d_perp, alpha, rho_s, rho_r):
    """Weighted two-hop rate as a function of the transmit split beta.

    The transmit beam beta*w_par + sqrt(1-beta^2)*w_perp trades beamforming
    gain along the leak direction against suppression; a = |u^H h_s|^2,
    p = |g^H w_par|^2, d_par = h_d^H w_par, d_perp = h_d^H w_perp.
    """
    root = math.sqrt(max(0.0, 1.0 - beta * beta))
    gs = rho_s * a / (rho_r * beta * beta * p + 1.0)
    gd = rho_r * abs(beta * d_par + root * d_perp) ** 2
    return alpha * math.log2(1.0 + gs) + (1.0 - alpha) * math.log2(1.0 + gd)


def bf_optimal(h_s, h_d, big_h, rho_s, rho_r, alpha):
    """Alternating receive/transmit optimization of the weighted objective
    alpha*log2(1+gamma_s) + (1-alpha)*log2(1+gamma_d).

    Each iteration solves the receive subproblem in closed form (MMSE) and
    the transmit subproblem by a one-dimensional search over the split
    between the leak-parallel and leak-orthogonal components, so the
    objective never decreases.  The loop is run from both a null-steering
    and an MRT warm start and the better endpoint is kept; it stops when
    consecutive u and w both move less than 1e-4, or after 1000 iterations.
    """
    h_s, h_d, big_h, m = _validated(h_s, h_d, big_h)
    _check_nonzero(h_s, h_d)
    gs, gd, u, w, iters, beta, _obj = kernels.optimal_pair(
        h_s, h_d, big_h, rho_s, rho_r, alpha
    )
    return BeamformerResult(
        u=u, w=w, gamma_s=float(gs), gamma_d=float(gd),
        iterations=int(iters), beta=float(beta),
    )


def weighted_objective(result, alpha, buf, i, j):
    """Selection metric alpha*C_S + (1-alpha)*C_D with buffer-capped rates."""
    if i == j:
        raise ValueError("receiving and transmitting relay must differ")
    c_s = inst_rate_receive(result.gamma_s, buf, i)
    c_d = inst_rate_transmit(result.gamma_d, buf, j)
    return alpha * c_s + (1.0 - alpha) * c_d
