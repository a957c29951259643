"""Regenerate sweep figures from a simulator results.csv.

Reads the CSV written by ``relaysim run``, picks one row per
(scheme, sweep point) — the first repetition, whose aggregate columns carry
the across-repetition mean and standard error — and draws one errorbar line
per scheme against the swept axis.  Series values are plotted exactly as
they appear in the CSV: nothing is recomputed, rescaled, or reordered, so a
figure can be checked against its CSV cell by cell.  Styling comes from the
committed ``figstyle.mplstyle`` next to this script, which makes repeated
renders of the same CSV byte-identical.

Usage:
    python3 plots/render.py --csv results.csv --axis snr --out fig.png
                            [--metric rate|delay|alpha] [--schemes ...]
                            [--logx] [--logy]

Rows whose sweep point is not finite (an infinite buffer size, say) cannot
be placed on a numeric axis and are dropped with a warning.  Schemes whose
rows carry no defined delay (bufferless baselines) are skipped with a
warning when the delay metric is requested, as are requested schemes absent
from the CSV.  An empty CSV is an error.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from pathlib import Path

_STYLE = Path(__file__).resolve().parent / "figstyle.mplstyle"

AXIS_LABELS = {
    "snr": "average SNR (dB)",
    "antennas": "antennas per relay M",
    "relays": "number of relays K",
    "buffer_size": "buffer size B_max (bits/s/Hz)",
    "iri_variance": "inter-relay interference variance (dB)",
}

# metric -> (value column, stderr column or None, y label)
METRICS = {
    "rate": ("avg_rate_D_mean", "avg_rate_D_stderr",
             "average end-to-end rate (bits/s/Hz)"),
    "delay": ("avg_delay_mean", "avg_delay_stderr", "average delay (slots)"),
    "alpha": ("alpha_mean", None, "adapted selection weight alpha"),
}

MARKERS = "osv^D<>Ph*Xd"


class RenderError(Exception):
    """A condition that should abort rendering with a nonzero exit."""


@dataclass
class FigureSpec:
    """One figure: which CSV, which axis and metric, where to write it."""
    csv_path: str
    axis: str
    out: str
    metric: str = "rate"
    schemes: list = field(default=None)
    logx: bool = False
    logy: bool = False


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def load_rows(csv_path):
    """Read the CSV into a list of dicts, in file order."""
    try:
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise RenderError(f"cannot read {csv_path}: {exc}")
    if not rows:
        raise RenderError(f"{csv_path} contains no data rows")
    return rows


def build_series(rows, spec):
    """Extract {scheme: (x, y, yerr)} for the figure, values straight
    from the CSV.

    Keeps the first row seen for every (scheme, point) pair — repetitions
    beyond the first only duplicate the aggregate columns — and preserves
    the CSV's own point order.
    """
    if spec.axis not in AXIS_LABELS:
        raise RenderError(f"unknown axis {spec.axis!r}; expected one of "
                          + ", ".join(sorted(AXIS_LABELS)))
    if spec.metric not in METRICS:
        raise RenderError(f"unknown metric {spec.metric!r}; expected one of "
                          + ", ".join(sorted(METRICS)))
    val_col, err_col, _ = METRICS[spec.metric]
    needed = {"scheme", "axis", "point", val_col}
    if err_col:
        needed.add(err_col)
    if spec.metric == "delay":
        needed.add("delay_defined")
    missing = needed - set(rows[0])
    if missing:
        raise RenderError("CSV lacks required columns: "
                          + ", ".join(sorted(missing)))
    csv_axes = {row["axis"] for row in rows}
    if spec.axis not in csv_axes:
        raise RenderError(f"CSV sweeps {', '.join(sorted(csv_axes))}, "
                          f"not {spec.axis}")

    csv_schemes = []
    for row in rows:
        if row["scheme"] not in csv_schemes:
            csv_schemes.append(row["scheme"])
    wanted = spec.schemes if spec.schemes else csv_schemes
    series = {}
    for scheme in wanted:
        if scheme not in csv_schemes:
            _warn(f"scheme {scheme!r} not present in the CSV; skipped")
            continue
        picked = {}
        delay_undefined = True
        for row in rows:
            if row["scheme"] != scheme or row["axis"] != spec.axis:
                continue
            if row["point"] in picked:
                continue
            if spec.metric == "delay" and row["delay_defined"] != "1":
                continue
            delay_undefined = False
            x = float(row["point"])
            if not math.isfinite(x):
                _warn(f"{scheme}: point {row['point']} is not finite; "
                      "dropped from the figure")
                continue
            picked[row["point"]] = (
                x, float(row[val_col]),
                float(row[err_col]) if err_col else None)
        if spec.metric == "delay" and delay_undefined:
            _warn(f"scheme {scheme!r} reports no defined delay; skipped")
            continue
        if not picked:
            _warn(f"scheme {scheme!r} has no plottable points; skipped")
            continue
        triples = list(picked.values())
        ys = [t[1] for t in triples]
        if spec.metric == "alpha" and all(math.isnan(y) for y in ys):
            _warn(f"scheme {scheme!r} adapts no selection weights; skipped")
            continue
        series[scheme] = ([t[0] for t in triples], ys,
                          None if err_col is None else [t[2] for t in triples])
    if not series:
        raise RenderError("nothing to plot: no requested scheme has data")
    return series


def render(spec):
    """Render one figure per the spec and return the plotted series."""
    rows = load_rows(spec.csv_path)
    series = build_series(rows, spec)
    _, _, y_label = METRICS[spec.metric]
    with plt.style.context(str(_STYLE)):
        fig, ax = plt.subplots()
        for n, (scheme, (xs, ys, errs)) in enumerate(series.items()):
            ax.errorbar(xs, ys, yerr=errs, label=scheme,
                        marker=MARKERS[n % len(MARKERS)])
        if spec.logx:
            ax.set_xscale("log")
        if spec.logy:
            ax.set_yscale("log")
        ax.set_xlabel(AXIS_LABELS[spec.axis])
        ax.set_ylabel(y_label)
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out)
        plt.close(fig)
    return series


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="render one sweep figure from a results.csv")
    parser.add_argument("--csv", required=True, help="input results.csv")
    parser.add_argument("--axis", required=True,
                        help="swept axis the CSV holds "
                             "(snr, antennas, relays, buffer_size, "
                             "iri_variance)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--metric", default="rate",
                        choices=sorted(METRICS),
                        help="quantity on the y axis (default: rate)")
    parser.add_argument("--schemes", nargs="+", default=None,
                        help="schemes to include (default: all in the CSV)")
    parser.add_argument("--logx", action="store_true",
                        help="logarithmic x axis")
    parser.add_argument("--logy", action="store_true",
                        help="logarithmic y axis")
    args = parser.parse_args(argv)
    spec = FigureSpec(csv_path=args.csv, axis=args.axis, out=args.out,
                      metric=args.metric, schemes=args.schemes,
                      logx=args.logx, logy=args.logy)
    try:
        render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
