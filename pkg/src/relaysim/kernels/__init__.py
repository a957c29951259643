"""Per-pair beamforming kernels with a compiled core and a pure fallback.

The compiled extension (relaysim.kernels._core, Cython) and the pure Python
module (relaysim.kernels._pure) implement the same functions with identical
scalar arithmetic and produce bit-identical results; the extension is simply
faster.  The compiled backend is preferred when it imports cleanly.

Set RELAYSIM_KERNELS=python (or "pure") to force the fallback, or
RELAYSIM_KERNELS=c (or "cython"/"compiled") to require the extension --
useful for benchmarking and for the cross-backend parity tests.

Note the compiled backend limits the antenna count to 64 per node; the pure
backend has no such limit.
"""

import os

from . import _pure


def _load(choice):
    if choice in ("python", "pure", "py"):
        return _pure
    try:
        from . import _core
    except ImportError:
        if choice in ("c", "cython", "compiled"):
            raise ImportError(
                "RELAYSIM_KERNELS=%s but the compiled extension is not available"
                % choice
            )
        return _pure
    return _core


_backend = _load(os.environ.get("RELAYSIM_KERNELS", "").strip().lower())


def backend(name=None):
    """Return a kernel backend module by name (None = the active default)."""
    if name is None:
        return _backend
    mod = _load(name.strip().lower())
    if name.strip().lower() in ("c", "cython", "compiled") and mod.IMPL != "cython":
        raise ImportError("compiled kernel backend is not available")
    return mod


IMPL = _backend.IMPL

SCHEME_IDEAL = _pure.SCHEME_IDEAL
SCHEME_SINR = _pure.SCHEME_SINR
SCHEME_ZF = _pure.SCHEME_ZF
SCHEME_MMSE = _pure.SCHEME_MMSE
SCHEME_OB = _pure.SCHEME_OB
SCHEME_OPTIMAL = _pure.SCHEME_OPTIMAL

iri_free_pair = _backend.iri_free_pair
zf_pair = _backend.zf_pair
mmse_pair = _backend.mmse_pair
ob_pair = _backend.ob_pair
beta_objective = _backend.beta_objective
optimize_beta = _backend.optimize_beta
optimal_single = _backend.optimal_single
optimal_pair = _backend.optimal_pair
mrc_mrt_gains = _backend.mrc_mrt_gains
best_pair = _backend.best_pair
