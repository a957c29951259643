"""Command-line front end: JSON experiment configs, sweeps, CSV emission.

Subcommands::

    relaysim run --config cfg.json [--out DIR] [--threads N] [--seed S]
    relaysim schemes

The config is a flat JSON object; power-like quantities carry a ``_db``
suffix and are converted to linear scale internally.  ``relaysim run``
writes ``results.csv`` (one row per scheme/point/repetition, '%.9g' float
formatting) and ``run-manifest.json`` (fully resolved config, package
version, seed — no timestamps), so re-running the same config yields
byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 1 runtime failure.
"""

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

import relaysim
from relaysim.channel import NetworkConfig
from relaysim.engine import SWEEP_AXES, run_sweep
from relaysim.errors import ConfigError
from relaysim.selection import ALL_SCHEMES

_ALPHA_MODES = ("subgradient", "backpressure")

_SCHEME_HELP = {
    "ideal": "interference-free selection bound (MRC receive, MRT transmit)",
    "sinr": "MRC/MRT beams kept, inter-relay interference endured",
    "zf": "transmit null-steering toward the receiving relay",
    "mmse": "MRT transmit with MMSE interference-aware receive beam",
    "ob": "random orthonormal receive/transmit directions, inverted transmit",
    "optimal": "alternating receive/transmit beam optimization per pair",
    "hd_brs": "half-duplex best relay selection (bufferless baseline)",
    "hd_mmrs": "half-duplex max-max relay selection (alternating roles)",
    "hd_mlrs": "half-duplex max-link relay selection over all 2K links",
    "sfd_mmrs": "virtual full-duplex max-max pair, interference ignored",
    "sfd_mmrs_iri": "virtual full-duplex max-max pair, interference endured",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment description (hashable, comparable)."""

    relays: int
    antennas: int
    snr_db: float
    var_sr_db: object  # float or length-relays tuple
    var_rd_db: object  # float or length-relays tuple
    var_rr_db: object  # float or tuple-of-tuples (relays x relays)
    buffer_size: float
    schemes: tuple
    axis: str
    points: tuple
    slots: int
    pretraining_slots: int
    repetitions: int
    alpha_mode: str
    seed: int
    out: str


_KNOWN_KEYS = (
    "relays", "antennas", "snr_db", "var_sr_db", "var_rd_db", "var_rr_db",
    "buffer_size", "schemes", "scheme", "axis", "points", "slots",
    "pretraining_slots", "repetitions", "alpha_mode", "seed", "out",
)


def _as_float(value, key):
    if isinstance(value, bool):
        raise ConfigError(f"config key '{key}' must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    raise ConfigError(f"config key '{key}' must be a number")


def _as_int(value, key):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key '{key}' must be an integer")
    return value


def _parse_var_vec(value, relays, key):
    if not isinstance(value, list):
        return _as_float(value, key)
    if len(value) != relays:
        raise ConfigError(
            f"config key '{key}' must be a number or a list of {relays}")
    return tuple(_as_float(x, f"{key}[{n}]") for n, x in enumerate(value))


def _parse_var_rr(value, relays):
    if not isinstance(value, list):
        return _as_float(value, "var_rr_db")
    if len(value) != relays or any(
            not isinstance(row, list) or len(row) != relays for row in value):
        raise ConfigError(
            f"config key 'var_rr_db' must be a number or a "
            f"{relays} x {relays} matrix")
    return tuple(
        tuple(_as_float(x, f"var_rr_db[{r}][{c}]") for c, x in enumerate(row))
        for r, row in enumerate(value)
    )


def _default_points(axis, raw, snr_db, relays, antennas, buffer_size,
                    var_rr_db):
    if axis == "snr":
        return (snr_db,)
    if axis == "antennas":
        return (float(antennas),)
    if axis == "relays":
        return (float(relays),)
    if axis == "buffer_size":
        return (buffer_size,)
    if isinstance(var_rr_db, tuple):
        raise ConfigError("config key 'points' is required when sweeping "
                          "iri_variance with a matrix var_rr_db")
    return (var_rr_db,)


def parse_config(source):
    """Parse a JSON experiment config into an :class:`ExperimentSpec`.

    ``source`` is a path to a JSON file (or an already-loaded dict).
    Unknown keys are rejected by name; defaults: 10000 data slots, 5000
    pre-training slots, 3 repetitions, unlimited buffers, all link
    variances 0 dB, subgradient alpha adaptation, seed 0.
    """
    if isinstance(source, dict):
        raw = source
    else:
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}")
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key '{key}'")

    relays = _as_int(raw.get("relays", 3), "relays")
    antennas = _as_int(raw.get("antennas", 2), "antennas")
    if relays < 2:
        raise ConfigError("config key 'relays' must be at least 2")
    if antennas < 1:
        raise ConfigError("config key 'antennas' must be at least 1")

    snr_db = _as_float(raw.get("snr_db", 10.0), "snr_db")
    var_sr_db = _parse_var_vec(raw.get("var_sr_db", 0.0), relays, "var_sr_db")
    var_rd_db = _parse_var_vec(raw.get("var_rd_db", 0.0), relays, "var_rd_db")
    var_rr_db = _parse_var_rr(raw.get("var_rr_db", 0.0), relays)

    buffer_size = _as_float(raw.get("buffer_size", "inf"), "buffer_size")
    if not buffer_size > 0.0:
        raise ConfigError("config key 'buffer_size' must be positive")

    if "scheme" in raw and "schemes" in raw:
        raise ConfigError("config keys 'scheme' and 'schemes' are exclusive")
    schemes = raw.get("schemes", raw.get("scheme", ["mmse"]))
    if isinstance(schemes, str):
        schemes = [schemes]
    if not isinstance(schemes, list) or not schemes:
        raise ConfigError("config key 'schemes' must be a non-empty list")
    for name in schemes:
        if name not in ALL_SCHEMES:
            raise ConfigError(f"unknown scheme '{name}'")
    schemes = tuple(schemes)

    axis = raw.get("axis", "snr")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis '{axis}'")
    points = raw.get("points")
    if points is None:
        points = _default_points(axis, raw, snr_db, relays, antennas,
                                 buffer_size, var_rr_db)
    else:
        if not isinstance(points, list) or not points:
            raise ConfigError("config key 'points' must be a non-empty list")
        points = tuple(_as_float(p, f"points[{n}]")
                       for n, p in enumerate(points))
    if axis in ("antennas", "relays"):
        for p in points:
            if not (float(p).is_integer() and p >= (2 if axis == "relays"
                                                    else 1)):
                raise ConfigError(f"config key 'points' has invalid {axis} "
                                  f"count {p}")

    slots = _as_int(raw.get("slots", 10000), "slots")
    pretraining_slots = _as_int(raw.get("pretraining_slots", 5000),
                                "pretraining_slots")
    repetitions = _as_int(raw.get("repetitions", 3), "repetitions")
    if slots < 1 or pretraining_slots < 0 or repetitions < 1:
        raise ConfigError("slot and repetition counts must be positive")

    alpha_mode = raw.get("alpha_mode", "subgradient")
    if alpha_mode not in _ALPHA_MODES:
        raise ConfigError(f"unknown alpha_mode '{alpha_mode}'")
    seed = _as_int(raw.get("seed", 0), "seed")
    out = raw.get("out", "results")
    if not isinstance(out, str) or not out:
        raise ConfigError("config key 'out' must be a non-empty path")

    return ExperimentSpec(
        relays=relays, antennas=antennas, snr_db=snr_db,
        var_sr_db=var_sr_db, var_rd_db=var_rd_db, var_rr_db=var_rr_db,
        buffer_size=buffer_size, schemes=schemes, axis=axis, points=points,
        slots=slots, pretraining_slots=pretraining_slots,
        repetitions=repetitions, alpha_mode=alpha_mode, seed=seed, out=out,
    )


def _json_number(value):
    return "inf" if math.isinf(value) else value


def _vec_to_json(value):
    return list(value) if isinstance(value, tuple) else _json_number(value)


def spec_to_dict(spec):
    """Serialize a spec back to its (fully resolved) JSON config form."""
    var_rr = spec.var_rr_db
    if isinstance(var_rr, tuple):
        var_rr = [list(row) for row in var_rr]
    else:
        var_rr = _json_number(var_rr)
    return {
        "relays": spec.relays,
        "antennas": spec.antennas,
        "snr_db": spec.snr_db,
        "var_sr_db": _vec_to_json(spec.var_sr_db),
        "var_rd_db": _vec_to_json(spec.var_rd_db),
        "var_rr_db": var_rr,
        "buffer_size": _json_number(spec.buffer_size),
        "schemes": list(spec.schemes),
        "axis": spec.axis,
        "points": [_json_number(p) for p in spec.points],
        "slots": spec.slots,
        "pretraining_slots": spec.pretraining_slots,
        "repetitions": spec.repetitions,
        "alpha_mode": spec.alpha_mode,
        "seed": spec.seed,
        "out": spec.out,
    }


def to_network_config(spec):
    """Build the linear-scale network description for a spec."""
    rho = 10.0 ** (spec.snr_db / 10.0)
    var_rr = spec.var_rr_db
    if isinstance(var_rr, tuple):
        var_rr = 10.0 ** (np.array(var_rr, dtype=float) / 10.0)
        np.fill_diagonal(var_rr, 0.0)
    else:
        var_rr = 10.0 ** (var_rr / 10.0)
    return NetworkConfig(
        n_relays=spec.relays,
        n_antennas=spec.antennas,
        rho_s=rho,
        rho_r=rho,
        var_sr=10.0 ** (np.asarray(spec.var_sr_db, dtype=float) / 10.0),
        var_rd=10.0 ** (np.asarray(spec.var_rd_db, dtype=float) / 10.0),
        var_rr=var_rr,
        b_max=spec.buffer_size,
        seed=spec.seed,
    )


def run_id_for(spec):
    """Deterministic 12-hex-digit id of the resolved config.

    The output directory is excluded: it states where results land, not
    what is computed.
    """
    resolved = spec_to_dict(spec)
    del resolved["out"]
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


_CSV_FIELDS = (
    ("run_id", None),
    ("scheme", "scheme"),
    ("axis", "axis"),
    ("point", "point"),
    ("rep", "rep"),
    ("seed", "seed"),
    ("slots", "slots"),
    ("avg_rate_D", "avg_rate_d"),
    ("avg_rate_S", "avg_rate_s"),
    ("avg_delay", "avg_delay"),
    ("delay_defined", "delay_defined"),
    ("flow_residual", "flow_residual"),
    ("alpha_mean", "alpha_mean"),
    ("alpha_min", "alpha_min"),
    ("alpha_max", "alpha_max"),
    ("avg_rate_D_mean", "avg_rate_d_mean"),
    ("avg_rate_D_stderr", "avg_rate_d_stderr"),
    ("avg_rate_S_mean", "avg_rate_s_mean"),
    ("avg_rate_S_stderr", "avg_rate_s_stderr"),
    ("avg_delay_mean", "avg_delay_mean"),
    ("avg_delay_stderr", "avg_delay_stderr"),
)


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.9g" % value
    return str(value)


def emit_results(spec, rows, out_dir):
    """Write results.csv and run-manifest.json; return their paths.

    Output is a pure function of (spec, rows): stable column order, '%.9g'
    floats, LF newlines, and a manifest without timestamps, so identical
    runs produce identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_id = run_id_for(spec)
    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(header for header, _ in _CSV_FIELDS) + "\n")
        for row in rows:
            cells = [run_id if key is None else _fmt(row[key])
                     for _, key in _CSV_FIELDS]
            fh.write(",".join(cells) + "\n")
    manifest = {
        "run_id": run_id,
        "version": relaysim.__version__,
        "root_seed": spec.seed,
        "seed_streams": "SeedSequence(seed, spawn_key=(point_index, "
                        "repetition)) spawned into 4 per-episode streams",
        "config": spec_to_dict(spec),
        "rows": len(rows),
    }
    manifest_path = out / "run-manifest.json"
    with open(manifest_path, "w", newline="") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return csv_path, manifest_path


def _cmd_run(args):
    spec = parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.out is not None:
        spec = replace(spec, out=args.out)
    config = to_network_config(spec)
    rows = run_sweep(
        spec.schemes, spec.axis, list(spec.points), config,
        repetitions=spec.repetitions, slots=spec.slots,
        pretrain_slots=spec.pretraining_slots, alpha_mode=spec.alpha_mode,
        threads=args.threads, seed=spec.seed,
    )
    csv_path, manifest_path = emit_results(spec, rows, spec.out)
    print(f"wrote {csv_path} ({len(rows)} rows) and {manifest_path}")
    return 0


def _cmd_schemes(_args):
    for name in ALL_SCHEMES:
        print(f"{name:13s} {_SCHEME_HELP[name]}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="relaysim",
        description="Buffer-aided relay selection and beamforming simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run the sweep described by a config")
    run_p.add_argument("--config", required=True,
                       help="path to a JSON experiment config")
    run_p.add_argument("--out", default=None,
                       help="output directory (default: config 'out' key)")
    run_p.add_argument("--threads", type=int, default=None,
                       help="worker processes for sweep cells")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the root seed")
    run_p.set_defaults(func=_cmd_run)
    schemes_p = sub.add_parser("schemes", help="list available schemes")
    schemes_p.set_defaults(func=_cmd_schemes)
    return parser


def entry(argv=None):
    """Console entry point; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(entry())
