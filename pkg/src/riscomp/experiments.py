"""Declarative parameter sweeps and their CSV form.

Each grid point draws its channels from a seed derived from the master
seed and the point's physical coordinates, so a point's numbers do not
depend on which sweep produced it or on the rest of the grid.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Any

import numpy as np

from . import __version__, rng
from .montecarlo import (
    SCHEMES, Estimates, energy_efficiency, energy_efficiency_stderr, outage_sum_rate,
    outage_sum_rate_stderr, run_schemes,
)
from .topology import NetworkTopology

KINDS = ("sweep-j", "sweep-k", "sweep-pt", "contour", "split-ratio", "point")

AXES = {
    "sweep-j": ("coop",),
    "sweep-k": ("elements",),
    "sweep-pt": ("pt_dbm",),
    "contour": ("pt_dbm", "rth"),
    "split-ratio": ("ratio", "coop"),
    "point": ("coop", "elements", "pt_dbm"),
}

DEFAULT_GRIDS = {
    "coop": (1, 2, 3, 4, 5, 6),
    "elements": (10, 30, 50, 70, 90, 110, 130, 150),
    "pt_dbm": (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0),
    "rth": (0.25, 0.5, 1.0, 1.5, 2.0),
    "ratio": (0.0, 0.25, 0.5, 0.75, 1.0),
}

DEFAULT_SCHEMES = {
    "sweep-j": ("none", "random", "eo", "ec"),
    "sweep-k": ("nocomp", "eo", "ec"),
    "sweep-pt": ("none", "random", "eo", "ec", "oma"),
    "contour": ("ec",),
    "split-ratio": ("ec",),
    "point": ("ec",),
}

# operating point held fixed by each experiment
DEFAULT_FIXED = {
    "sweep-j": {"elements": 70, "pt_dbm": 0.0},
    "sweep-k": {"coop": 4, "pt_dbm": 0.0},
    "sweep-pt": {"coop": 4, "elements": 70},
    "contour": {"coop": 4, "elements": 70},
    "split-ratio": {"elements": 72, "pt_dbm": 0.0},
    "point": {},
}

SPLIT_COOP = (1, 3, 6)

METRIC_COLUMNS = (
    "scheme", "p_out_edge", "p_out_center_mean", "rate_edge", "rate_center_sum",
    "outage_sum_rate", "energy_efficiency", "stderr_p_out_edge", "stderr_rate_edge",
    "stderr_outage_sum_rate", "stderr_energy_efficiency", "n_trials", "seed",
    "outage_sum_rate_alt", "energy_efficiency_alt",
)


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    grids: dict[str, tuple]
    schemes: tuple[str, ...]
    n_trials: int = 10_000
    seed: int = 0
    fixed: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment {self.kind!r}")
        for axis in AXES[self.kind]:
            grid = self.grids.get(axis)
            if not grid:
                raise ValueError(f"grid for {axis!r} is empty")
            if list(grid) != sorted(grid):
                raise ValueError(f"grid for {axis!r} must be sorted")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be positive")

    def points(self):
        axes = AXES[self.kind]
        for values in product(*(self.grids[a] for a in axes)):
            yield dict(zip(axes, values))


def make_spec(kind: str, n_trials: int = 10_000, seed: int = 0, schemes=None,
              grids: dict | None = None, fixed: dict | None = None) -> SweepSpec:
    """Spec with figure defaults; ``grids``/``fixed`` entries override them."""
    if kind not in AXES:
        raise ValueError(f"unknown experiment {kind!r}; expected one of {KINDS}")
    axes = AXES[kind]
    all_grids = {**DEFAULT_GRIDS, "coop": SPLIT_COOP if kind == "split-ratio" else DEFAULT_GRIDS["coop"]}
    all_grids.update(grids or {})
    return SweepSpec(
        kind=kind,
        grids={a: tuple(all_grids[a]) for a in axes},
        schemes=tuple(schemes or DEFAULT_SCHEMES[kind]),
        n_trials=n_trials,
        seed=seed,
        fixed={**DEFAULT_FIXED[kind], **(fixed or {})},
    )


def point_coordinates(template: NetworkTopology, kind: str, point: dict, fixed: dict):
    """Resolve a grid point to (topology, split ratio)."""
    values = {**fixed, **point}
    changes = {}
    if "coop" in values:
        changes["coop"] = int(values["coop"])
    if "elements" in values:
        changes["ris_elements"] = int(values["elements"])
    if "pt_dbm" in values:
        changes["pt_dbm"] = float(values["pt_dbm"])
    if "rth" in values:
        changes["rate_center"] = changes["rate_edge"] = float(values["rth"])
    if "rth_center" in values:
        changes["rate_center"] = float(values["rth_center"])
    if "rth_edge" in values:
        changes["rate_edge"] = float(values["rth_edge"])
    topology = template.with_(**changes) if changes else template
    ratio = values.get("ratio")
    if kind == "split-ratio" and ratio is None:
        raise ValueError("split-ratio points need a ratio")
    return topology, (None if ratio is None else float(ratio))


def point_seed(master: int, topology: NetworkTopology, split_ratio: float | None) -> int:
    """Seed for one operating point, keyed by its physical coordinates."""
    t = topology
    return rng.derive_seed(
        master, "point", t.coop_count, t.ris_elements, repr(t.power.pt_dbm),
        repr(t.thresholds.rate_center), repr(t.thresholds.rate_edge), repr(split_ratio))


def config_hash(topology: NetworkTopology) -> str:
    blob = json.dumps(topology.to_config(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Record:
    axes: dict[str, Any]
    scheme: str
    estimates: Estimates
    outage_sum_rate: float
    energy_efficiency: float
    stderr_outage_sum_rate: float
    stderr_energy_efficiency: float
    wall_time: float = 0.0

    def row(self) -> dict[str, Any]:
        e = self.estimates
        topo = e.topology
        alt_mode = "per_trial" if topo.rout_mode == "literal" else "literal"
        alt = topo.with_(rout_mode=alt_mode)
        alt_est = _with_topology(e, alt)
        return {
            **self.axes,
            "scheme": self.scheme,
            "p_out_edge": e.p_out_edge,
            "p_out_center_mean": float(np.mean(e.p_out_center)),
            "rate_edge": e.mean_rate_edge,
            "rate_center_sum": float(np.sum(e.mean_rate_center)),
            "outage_sum_rate": self.outage_sum_rate,
            "energy_efficiency": self.energy_efficiency,
            "stderr_p_out_edge": e.se_p_out_edge,
            "stderr_rate_edge": e.se_rate_edge,
            "stderr_outage_sum_rate": self.stderr_outage_sum_rate,
            "stderr_energy_efficiency": self.stderr_energy_efficiency,
            "n_trials": e.n_trials,
            "seed": e.seed,
            "outage_sum_rate_alt": outage_sum_rate(alt_est),
            "energy_efficiency_alt": energy_efficiency(alt_est),
        }


def _with_topology(e: Estimates, topology: NetworkTopology) -> Estimates:
    return replace(e, topology=topology)


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[Record]
    provenance: dict[str, Any]

    def record(self, scheme: str, **axes) -> Record:
        for r in self.records:
            if r.scheme == scheme and all(r.axes.get(k) == v for k, v in axes.items()):
                return r
        raise KeyError((scheme, axes))

    def series(self, scheme: str, axis: str, metric: str = "energy_efficiency", **fixed):
        """(x, y, stderr) arrays for one scheme along one axis."""
        rows = [r for r in self.records if r.scheme == scheme
                and all(r.axes.get(k) == v for k, v in fixed.items())]
        rows.sort(key=lambda r: r.axes[axis])
        x = np.array([r.axes[axis] for r in rows])
        y = np.array([getattr(r, metric) for r in rows])
        se = np.array([getattr(r, f"stderr_{metric}") for r in rows])
        return x, y, se

    def to_csv(self) -> str:
        columns = list(AXES[self.spec.kind]) + list(METRIC_COLUMNS)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in self.records:
            row = r.row()
            writer.writerow([_fmt(row[c]) for c in columns])
        return buf.getvalue()

    def manifest(self) -> dict[str, Any]:
        return {
            **self.provenance,
            "experiment": self.spec.kind,
            "grids": {k: list(v) for k, v in self.spec.grids.items()},
            "fixed": self.spec.fixed,
            "schemes": list(self.spec.schemes),
            "n_trials": self.spec.n_trials,
            "wall_time_s": {f"{r.scheme}@{_key(r.axes)}": round(r.wall_time, 3) for r in self.records},
        }


def _key(axes: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in axes.items())


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return str(v)


def run_sweep(template: NetworkTopology, spec: SweepSpec, workers: int = 1, progress=None) -> SweepResult:
    """Evaluate every (grid point, scheme) pair in grid order."""
    records = []
    for point in spec.points():
        topology, ratio = point_coordinates(template, spec.kind, point, spec.fixed)
        seed = point_seed(spec.seed, topology, ratio)
        t0 = time.perf_counter()
        estimates = run_schemes(topology, spec.schemes, ratio, spec.n_trials, seed, workers)
        elapsed = (time.perf_counter() - t0) / len(spec.schemes)
        for scheme in spec.schemes:
            e = estimates[scheme]
            rec = Record(
                axes=dict(point),
                scheme=scheme,
                estimates=e,
                outage_sum_rate=outage_sum_rate(e),
                energy_efficiency=energy_efficiency(e),
                stderr_outage_sum_rate=outage_sum_rate_stderr(e),
                stderr_energy_efficiency=energy_efficiency_stderr(e),
                wall_time=elapsed,
            )
            records.append(rec)
            if progress:
                progress(rec)
    provenance = {
        "seed": spec.seed,
        "config_hash": config_hash(template),
        "code_version": __version__,
    }
    return SweepResult(spec, records, provenance)


def sweep_coop(template, j_grid=None, schemes=None, n_trials=10_000, seed=0, workers=1, **fixed):
    bad = [j for j in (j_grid or ()) if not 1 <= j <= template.cell_count]
    if bad:
        raise ValueError(f"cooperative-set sizes {bad} outside [1, {template.cell_count}]")
    grids = {"coop": j_grid} if j_grid else None
    return run_sweep(template, make_spec("sweep-j", n_trials, seed, schemes, grids, fixed), workers)


def sweep_elements(template, k_grid=None, schemes=None, n_trials=10_000, seed=0, workers=1, **fixed):
    grids = {"elements": k_grid} if k_grid else None
    return run_sweep(template, make_spec("sweep-k", n_trials, seed, schemes, grids, fixed), workers)


def sweep_power(template, pt_grid=None, schemes=None, n_trials=10_000, seed=0, workers=1, **fixed):
    grids = {"pt_dbm": pt_grid} if pt_grid else None
    return run_sweep(template, make_spec("sweep-pt", n_trials, seed, schemes, grids, fixed), workers)


def sweep_contour(template, pt_grid=None, rth_grid=None, n_trials=10_000, seed=0, workers=1,
                  schemes=None, **fixed):
    grids = {}
    if pt_grid:
        grids["pt_dbm"] = pt_grid
    if rth_grid:
        grids["rth"] = rth_grid
    return run_sweep(template, make_spec("contour", n_trials, seed, schemes, grids, fixed), workers)


def sweep_split(template, ratio_grid=None, j_list=None, n_trials=10_000, seed=0, workers=1,
                schemes=None, **fixed):
    grids = {}
    if ratio_grid:
        grids["ratio"] = ratio_grid
    if j_list:
        grids["coop"] = j_list
    return run_sweep(template, make_spec("split-ratio", n_trials, seed, schemes, grids, fixed), workers)


def read_csv(path) -> tuple[str | None, list[dict[str, Any]]]:
    """Parse a sweep CSV; numeric fields become floats. Returns (kind, rows)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    parsed = []
    for row in rows:
        parsed.append({k: (v if k == "scheme" else float(v)) for k, v in row.items()})
    header = tuple(rows[0].keys()) if rows else ()
    kind = None
    for k, axes in AXES.items():
        if header[:len(axes)] == axes and (len(header) == len(axes) + len(METRIC_COLUMNS)):
            kind = k
            break
    return kind, parsed
