"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import experiments as ex
from .plots import render_plots
from .topology import ConfigError, build_topology, describe, load_config

OUT_ENV = "RISCOMP_OUT"

SUBCOMMANDS = {
    "sweep-j": "energy efficiency vs. number of cooperative BSs",
    "sweep-k": "energy efficiency vs. number of RIS elements",
    "sweep-pt": "outage sum rate vs. transmit power (incl. OMA)",
    "contour": "energy efficiency over transmit power and rate threshold",
    "split-ratio": "outage sum rate vs. CO/EO split ratio",
    "point": "a single operating point",
    "validate": "check a config and print the resolved parameters",
    "replot": "render figures from existing CSV files",
}

# flag -> sweep axis
AXIS_FLAGS = {"coop": "coop", "elements": "elements", "pt": "pt_dbm", "rth": "rth", "ratio": "ratio"}


def _numbers(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riscomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="TOML config file")
        if name == "replot":
            p.add_argument("csv", nargs="+", type=Path)
            p.add_argument("--format", default="png", choices=("png", "svg"))
            continue
        if name == "validate":
            continue
        p.add_argument("--out", type=Path, default=None,
                       help=f"output directory (default ${OUT_ENV} or ./results)")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--trials", type=_positive_int, default=10_000)
        p.add_argument("--workers", type=_positive_int, default=1)
        p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
        p.add_argument("--format", default="png", choices=("png", "svg"))
        p.add_argument("--scheme", type=lambda s: [v.strip().lower() for v in s.split(",")],
                       help="comma-separated schemes: none,random,eo,ec,nocomp,oma")
        for flag in AXIS_FLAGS:
            p.add_argument(f"--{flag}", type=_numbers, default=None)
        p.add_argument("--rth-center", type=float, default=None)
        p.add_argument("--rth-edge", type=float, default=None)
    return parser


def _template(args):
    config = load_config(args.config) if args.config else {}
    return build_topology(config)


def _spec(args, kind: str, template) -> ex.SweepSpec:
    axes = ex.AXES[kind]
    grids, fixed = {}, {}
    for flag, axis in AXIS_FLAGS.items():
        values = getattr(args, flag)
        if values is None:
            continue
        if axis in ("coop", "elements"):
            if any(not float(v).is_integer() for v in values):
                raise ConfigError(f"--{flag}", "must be integers")
            values = [int(v) for v in values]
        if axis in axes:
            if kind == "point" and len(values) != 1:
                raise ConfigError(f"--{flag}", "takes a single value for point")
            grids[axis] = sorted(values)
        else:
            if len(values) != 1:
                raise ConfigError(f"--{flag}", f"takes a single value for {kind}")
            fixed[axis] = values[0]
    if kind == "point":
        # unspecified coordinates come from the config's operating point
        grids.setdefault("coop", [template.coop_count])
        grids.setdefault("elements", [template.ris_elements])
        grids.setdefault("pt_dbm", [template.power.pt_dbm[0]])
    if args.rth_center is not None:
        fixed["rth_center"] = args.rth_center
    if args.rth_edge is not None:
        fixed["rth_edge"] = args.rth_edge
    return ex.make_spec(kind, args.trials, args.seed, args.scheme, grids, fixed)


def _run(args) -> int:
    if args.command == "validate":
        topology = _template(args)
        print(json.dumps(describe(topology), indent=2))
        return 0

    if args.command == "replot":
        for path in args.csv:
            kind, rows = ex.read_csv(path)
            if kind is None:
                raise ConfigError(str(path), "unrecognised CSV header")
            for out in render_plots(rows, kind, path.with_suffix(""), formats=(args.format,)):
                print(out)
        return 0

    template = _template(args)
    kind = args.command
    spec = _spec(args, kind, template)
    if "coop" in spec.grids:
        bad = [j for j in spec.grids["coop"] if not 1 <= j <= template.cell_count]
        if bad:
            raise ConfigError("--coop", f"values {bad} outside [1, {template.cell_count}]")

    out_dir = args.out or Path(os.environ.get(OUT_ENV, "results"))
    out_dir.mkdir(parents=True, exist_ok=True)

    def progress(rec):
        axes = " ".join(f"{k}={v:g}" for k, v in rec.axes.items())
        print(f"{kind} {axes} {rec.scheme:>6}: EE={rec.energy_efficiency:.6g} "
              f"OSR={rec.outage_sum_rate:.6g} Pout_e={rec.estimates.p_out_edge:.4f}", flush=True)

    result = ex.run_sweep(template, spec, workers=args.workers, progress=progress)
    csv_path = out_dir / f"{kind}.csv"
    csv_path.write_text(result.to_csv())
    manifest = {**result.manifest(), "config": str(args.config) if args.config else None,
                "workers": args.workers, "plot": args.plot, "out": str(out_dir)}
    (out_dir / f"{kind}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    if args.plot:
        render_plots(result, kind, out_dir / kind, formats=(args.format,))
    print(f"wrote {csv_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
