"""Instantaneous SINR/SNR, buffer-capped link rates, and buffer updates.

With a Gaussian codebook the receive link supports log2(1 + SINR) bits per
channel use, but a relay can only accept what its buffer has room for and can
only forward what its buffer holds, so both instantaneous rates are clamped
by the buffer state.
"""

import math
from dataclasses import dataclass

import numpy as np

from relaysim.errors import BufferViolationError, DimensionError

#: floating-point slack when checking buffer feasibility
_EPS = 1e-12


@dataclass(frozen=True)
class BufferState:
    """Per-relay queue occupancy in bits per channel use.

    levels[k] is the content of relay k's buffer, always in [0, b_max].
    """

    levels: np.ndarray
    b_max: float = float("inf")

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=np.float64).copy()
        if levels.ndim != 1:
            raise DimensionError("buffer levels must be a 1-D array")
        if np.any(levels < 0.0) or np.any(levels > self.b_max):
            raise BufferViolationError(
                f"buffer levels outside [0, {self.b_max}]: {levels}"
            )
        object.__setattr__(self, "levels", levels)

    def headroom(self, i):
        """Free space B_max - B[i] at relay i (inf when unbounded)."""
        return self.b_max - float(self.levels[i])


@dataclass(frozen=True)
class LinkRates:
    """SINR/SNR and the buffer-capped rates of one slot's two hops."""

    gamma_s: float
    gamma_d: float
    c_s: float
    c_d: float


def sinr_receive(h_s, big_h, u, w, rho_s, rho_r):
    """SINR at the receiving relay: rho_S |u^H h_S|^2 / (1 + rho_R |u^H H w|^2).

    The denominator's 1 is the unit-power noise seen through the unit-norm
    combiner u; the second term is the interference the transmitting relay's
    beam w leaks into u through the inter-relay channel H.
    """
    _check_unit(u, "u")
    _check_unit(w, "w")
    sig = abs(np.vdot(u, np.asarray(h_s, dtype=np.complex128))) ** 2
    leak = abs(np.vdot(u, np.asarray(big_h, dtype=np.complex128) @ np.asarray(w, dtype=np.complex128))) ** 2
    return rho_s * sig / (1.0 + rho_r * leak)


def snr_transmit(h_d, w, rho_r):
    """SNR at the destination: rho_R |h_D^H w|^2 (no interference at D)."""
    _check_unit(w, "w")
    return rho_r * abs(np.vdot(np.asarray(h_d, dtype=np.complex128), w)) ** 2


def _check_unit(v, name):
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"{name} must be unit-norm, got ||{name}|| = {n!r}")


def inst_rate_receive(gamma, buf, i):
    """min(log2(1 + gamma), headroom of relay i): what the buffer can accept."""
    rate = math.log2(1.0 + gamma)
    head = buf.headroom(i)
    return rate if rate < head else max(head, 0.0)


def inst_rate_transmit(gamma, buf, j):
    """min(log2(1 + gamma), level of relay j): what the buffer can supply."""
    rate = math.log2(1.0 + gamma)
    level = float(buf.levels[j])
    return rate if rate < level else level


def apply_slot(buf, i, c_s, j, c_d):
    """Account one slot: relay i stores c_s bits, relay j releases c_d bits.

    Rounding residue down to -1e-12 is clamped to zero; anything larger means
    the caller selected infeasible rates and is reported as a hard error.
    """
    if i == j:
        raise ValueError("receiving and transmitting relay must differ")
    levels = buf.levels.copy()
    if c_s > buf.headroom(i) + _EPS:
        raise BufferViolationError(
            f"relay {i}: storing {c_s} exceeds headroom {buf.headroom(i)}"
        )
    if c_d > levels[j] + _EPS:
        raise BufferViolationError(
            f"relay {j}: releasing {c_d} exceeds level {levels[j]}"
        )
    levels[i] += c_s
    levels[j] -= c_d
    if levels[j] < 0.0:
        if levels[j] < -_EPS:
            raise BufferViolationError(f"relay {j}: negative level {levels[j]}")
        levels[j] = 0.0
    if math.isfinite(buf.b_max) and levels[i] > buf.b_max:
        if levels[i] > buf.b_max + _EPS:
            raise BufferViolationError(f"relay {i}: level {levels[i]} above b_max")
        levels[i] = buf.b_max
    return BufferState(levels=levels, b_max=buf.b_max)
