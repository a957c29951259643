"""relaysim: Monte Carlo simulator for virtual full-duplex buffer-aided relaying.

A source delivers data to a destination through K half-duplex buffer-aided
relays.  In each slot one relay receives while another transmits, so the relay
pair mimics a full-duplex node and the transmitting relay interferes with the
receiving one.  The package simulates joint relay-pair selection and
beamforming under that inter-relay interference, plus the usual half-duplex
and fixed-pair baselines.
"""

__version__ = "0.1.0"

from relaysim.errors import (
    ConfigError,
    DegenerateInputError,
    DimensionError,
    UnsupportedConfigError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DegenerateInputError",
    "DimensionError",
    "UnsupportedConfigError",
]
