"""Benchmark the compiled beamforming kernels against the pure-Python port.

Times each hot kernel on identical pre-generated inputs for both backends
and prints per-call latency plus the compiled speedup.  Because the two
implementations are bit-compatible, the max output deviation is printed as
a sanity column (it should be exactly 0).

Usage:
    python3 benchmarks/bench_kernels.py [--instances N] [--antennas 2 4 8]
"""

import argparse
import time

import numpy as np

from relaysim import kernels
from relaysim.linalg import random_orthonormal_pair


def _cn(rng, *shape):
    z = rng.standard_normal(shape + (2,))
    return np.ascontiguousarray((z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0))


def _instances(rng, n, m):
    """Pre-draw n random (h_s, h_d, H) triples at 0 dB average power."""
    return [(_cn(rng, m), _cn(rng, m), _cn(rng, m, m)) for _ in range(n)]


def _time(fn, args_list):
    t0 = time.perf_counter()
    out = [fn(*args) for args in args_list]
    return time.perf_counter() - t0, out


def _deviation(a_out, b_out):
    worst = 0.0
    for a, b in zip(a_out, b_out):
        for x, y in zip(a, b):
            if isinstance(x, (int, float, bool)):
                worst = max(worst, abs(float(x) - float(y)))
            else:
                xa = np.asarray(x, dtype=complex)
                ya = np.asarray(y, dtype=complex)
                if xa.size:
                    worst = max(worst, float(np.abs(xa - ya).max()))
    return worst


def bench(m, n_fast, n_slow, seed):
    """Yield (name, per-call seconds pure, compiled, max deviation) rows."""
    rng = np.random.default_rng(seed)
    pure = kernels.backend("python")
    comp = kernels.backend("c")
    fast = _instances(rng, n_fast, m)
    slow = fast[:n_slow]

    cases = [
        ("iri_free_pair",
         [(hs, hd, hh, 10.0, 10.0, True) for hs, hd, hh in fast]),
        ("zf_pair", [(hs, hd, hh, 10.0, 10.0) for hs, hd, hh in fast]),
        ("mmse_pair", [(hs, hd, hh, 10.0, 10.0) for hs, hd, hh in fast]),
    ]
    ob_args = []
    for hs, hd, hh in fast:
        u, q = random_orthonormal_pair(m, rng)
        ob_args.append((hs, hd, hh, u, q, 10.0, 10.0))
    cases.append(("ob_pair", ob_args))
    cases.append(("optimal_pair",
                  [(hs, hd, hh, 10.0, 10.0, 0.5, 0.5) for hs, hd, hh in slow]))

    k = 3
    sel = []
    for _ in range(n_slow):
        h_rr = _cn(rng, k, k, m, m)
        h_rr[np.arange(k), np.arange(k)] = 0.0
        sel.append((kernels.SCHEME_MMSE, _cn(rng, k, m), _cn(rng, k, m),
                    h_rr, 10.0, 10.0, np.full(k, 0.5), np.full(k, 25.0),
                    50.0))
    cases.append(("best_pair (K=3, mmse)", sel))

    for name, args_list in cases:
        fname = name.split(" ")[0]
        tp, op = _time(getattr(pure, fname), args_list)
        tc, oc = _time(getattr(comp, fname), args_list)
        n = len(args_list)
        yield name, tp / n, tc / n, _deviation(op, oc)


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare pure-Python and compiled kernel backends")
    parser.add_argument("--instances", type=int, default=2000,
                        help="instances per cheap kernel (default 2000)")
    parser.add_argument("--slow-instances", type=int, default=200,
                        help="instances for iterative kernels (default 200)")
    parser.add_argument("--antennas", type=int, nargs="+", default=[2, 4, 8],
                        help="antenna counts to benchmark (default 2 4 8)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    print(f"active default backend: {kernels.IMPL}")
    header = (f"{'kernel':<24} {'M':>3} {'pure us':>10} {'compiled us':>12} "
              f"{'speedup':>8} {'max dev':>9}")
    print(header)
    print("-" * len(header))
    for m in args.antennas:
        for name, tp, tc, dev in bench(m, args.instances,
                                       args.slow_instances, args.seed):
            print(f"{name:<24} {m:>3} {tp * 1e6:>10.1f} {tc * 1e6:>12.1f} "
                  f"{tp / tc:>8.1f} {dev:>9.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
