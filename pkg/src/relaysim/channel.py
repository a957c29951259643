"""Network description and block-fading channel draws.

All channels are i.i.d. across slots (block fading): within a slot every
coefficient is constant, and a fresh independent realization is drawn for the
next slot.  Entries are circularly symmetric complex Gaussian with the
per-link variances held in NetworkConfig.  Noise power is normalized to one,
so rho_s and rho_r are transmit SNRs.
"""

from dataclasses import dataclass

import numpy as np

from relaysim.errors import ConfigError


@dataclass(frozen=True)
class NetworkConfig:
    """Static description of the relay network.

    n_relays   number of half-duplex relays K
    n_antennas antennas per relay M (source and destination have one)
    rho_s      source transmit SNR (linear)
    rho_r      relay transmit SNR (linear)
    var_sr     (K,) variance of each source->relay link
    var_rd     (K,) variance of each relay->destination link
    var_rr     (K, K) variance of each relay->relay link, [j, i] = j to i;
               diagonal entries are ignored (a relay never interferes with
               itself because it is either receiving or transmitting)
    b_max      relay buffer capacity in bits/s/Hz, may be math.inf
    seed       optional root RNG seed recorded for reproducibility; draw()
               itself takes an explicit generator
    """

    n_relays: int
    n_antennas: int
    rho_s: float
    rho_r: float
    var_sr: np.ndarray
    var_rd: np.ndarray
    var_rr: np.ndarray
    b_max: float = float("inf")
    seed: int | None = None

    def __post_init__(self):
        k, m = self.n_relays, self.n_antennas
        if k < 2:
            raise ConfigError(f"n_relays must be >= 2, got {k}")
        if m < 1:
            raise ConfigError(f"n_antennas must be >= 1, got {m}")
        if not (self.rho_s > 0.0 and self.rho_r > 0.0):
            raise ConfigError("rho_s and rho_r must be positive")
        if not self.b_max > 0.0:
            raise ConfigError("b_max must be positive (use inf for unbounded)")
        object.__setattr__(
            self, "var_sr", _positive_vector(self.var_sr, k, "var_sr")
        )
        object.__setattr__(
            self, "var_rd", _positive_vector(self.var_rd, k, "var_rd")
        )
        var_rr = np.asarray(self.var_rr, dtype=np.float64)
        if var_rr.shape == ():
            var_rr = np.full((k, k), float(var_rr))
        if var_rr.shape != (k, k):
            raise ConfigError(f"var_rr must be scalar or ({k}, {k}), got {var_rr.shape}")
        if np.any(var_rr < 0.0) or not np.all(np.isfinite(var_rr)):
            raise ConfigError("var_rr entries must be finite and nonnegative")
        var_rr = var_rr.copy()
        np.fill_diagonal(var_rr, 0.0)
        object.__setattr__(self, "var_rr", var_rr)


def _positive_vector(v, k, name):
    v = np.asarray(v, dtype=np.float64)
    if v.shape == ():
        v = np.full(k, float(v))
    if v.shape != (k,):
        raise ConfigError(f"{name} must be scalar or length {k}, got shape {v.shape}")
    if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise ConfigError(f"{name} entries must be finite and positive")
    return v


@dataclass(frozen=True)
class ChannelRealization:
    """One slot's worth of channel coefficients.

    h_sr  (K, M)        source -> relay i receive vectors
    h_rd  (K, M)        relay j -> destination transmit vectors
    h_rr  (K, K, M, M)  inter-relay matrices, [j, i] = transmitter j to
                        receiver i; the diagonal is identically zero and
                        never read
    """

    h_sr: np.ndarray
    h_rd: np.ndarray
    h_rr: np.ndarray


def draw(config, rng):
    """Draw one independent block-fading realization.

    Each coefficient is CN(0, var) for the link's configured variance: real
    and imaginary parts are independent N(0, var/2).  Draw order (h_sr, h_rd,
    h_rr) is fixed so a seeded generator reproduces the same sequence.
    """
    k, m = config.n_relays, config.n_antennas
    h_sr = _cn_matrix((k, m), rng) * np.sqrt(config.var_sr)[:, None]
    h_rd = _cn_matrix((k, m), rng) * np.sqrt(config.var_rd)[:, None]
    h_rr = _cn_matrix((k, k, m, m), rng) * np.sqrt(config.var_rr)[:, :, None, None]
    return ChannelRealization(h_sr=h_sr, h_rd=h_rd, h_rr=h_rr)


def _cn_matrix(shape, rng):
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
