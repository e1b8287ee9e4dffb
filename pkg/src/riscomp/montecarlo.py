"""Monte Carlo estimation of outage, rates, outage sum rate and energy efficiency.

Trials are generated in fixed chunks of :data:`CHUNK` consecutive indices.
Workers only change *where* a chunk is computed; per-trial values are
concatenated in trial order before any reduction, so results are
bit-identical for every worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import phy
from .channel import realize_batch
from .pbf import Mode, Scheme, assign_modes, build_phase_plan
from .topology import NetworkTopology

CHUNK = 1000
N_BATCHES = 20

SCHEMES = ("none", "random", "eo", "ec", "nocomp", "oma")
SCHEME_LABELS = {
    "none": "CoMP-NOMA, no RIS",
    "random": "CoMP-NOMA, random RIS",
    "eo": "CoMP-NOMA, EO",
    "ec": "CoMP-NOMA, EC",
    "nocomp": "No-CoMP, EC",
    "oma": "CoMP-OMA, EC",
}


def scheme_topology(topology: NetworkTopology, scheme: str) -> NetworkTopology:
    """The topology a scheme actually runs on ("nocomp" serves the edge from BS 0 only)."""
    if scheme == "nocomp" and topology.coop_count != 1:
        return topology.with_(coop=1)
    return topology


def phase_scheme(scheme: str) -> Scheme:
    return Scheme.EC if scheme in ("nocomp", "oma") else Scheme(scheme)


@dataclass(frozen=True)
class Estimates:
    scheme: str
    topology: NetworkTopology
    n_trials: int
    seed: int
    split_ratio: float | None
    active_elements: np.ndarray  # (I,) RIS elements not OFF
    p_out_edge: float
    p_out_center: np.ndarray
    mean_rate_edge: float
    mean_rate_center: np.ndarray
    se_p_out_edge: float
    se_p_out_center: np.ndarray
    se_rate_edge: float
    se_rate_center: np.ndarray
    rout_edge_literal: float
    rout_center_literal: np.ndarray
    rout_edge_per_trial: float
    rout_center_per_trial: np.ndarray
    batch_rout_edge: np.ndarray  # (B,) in the topology's rout_mode
    batch_rout_center: np.ndarray  # (B, I)

    @property
    def rout_edge(self) -> float:
        if self.topology.rout_mode == "per_trial":
            return self.rout_edge_per_trial
        return self.rout_edge_literal

    @property
    def rout_center(self) -> np.ndarray:
        if self.topology.rout_mode == "per_trial":
            return self.rout_center_per_trial
        return self.rout_center_literal


def _simulate_chunk(args):
    topology, schemes, split_ratio, seed, start, stop = args
    out = {}
    realization = realize_batch(topology, seed, start, stop)
    for scheme in schemes:
        modes = assign_modes(topology, phase_scheme(scheme), split_ratio)
        plan = build_phase_plan(realization, modes, seed)
        if scheme == "oma":
            o = phy.evaluate_trial_oma(realization, topology, phase_plan=plan)
        else:
            o = phy.evaluate_trial(realization, plan, topology, scheme=scheme)
        out[scheme] = (o.rate_edge, o.rate_center, o.outage_edge, o.outage_center)
    return out


def _chunks(n_trials: int):
    return [(s, min(s + CHUNK, n_trials)) for s in range(0, n_trials, CHUNK)]


def _rout(outage, rates, mode):
    if mode == "per_trial":
        return np.mean(np.where(outage, 0.0, rates), axis=0)
    return (1.0 - np.mean(outage, axis=0)) * np.mean(rates, axis=0)


def _estimates(scheme, topology, n, seed, split_ratio, modes, re, rc, oe, oc) -> Estimates:
    p_e, p_c = float(np.mean(oe)), np.mean(oc, axis=0)
    r_e, r_c = float(np.mean(re)), np.mean(rc, axis=0)
    ddof = 1 if n > 1 else 0
    n_batches = min(N_BATCHES, n)
    edges = (np.arange(n_batches + 1) * n) // n_batches
    batch_e = np.array([_rout(oe[a:b], re[a:b], topology.rout_mode) for a, b in zip(edges, edges[1:])])
    batch_c = np.array([_rout(oc[a:b], rc[a:b], topology.rout_mode) for a, b in zip(edges, edges[1:])])
    return Estimates(
        scheme=scheme,
        topology=topology,
        n_trials=n,
        seed=seed,
        split_ratio=split_ratio,
        active_elements=np.sum(modes != Mode.OFF, axis=1),
        p_out_edge=p_e,
        p_out_center=p_c,
        mean_rate_edge=r_e,
        mean_rate_center=r_c,
        se_p_out_edge=float(np.sqrt(p_e * (1 - p_e) / n)),
        se_p_out_center=np.sqrt(p_c * (1 - p_c) / n),
        se_rate_edge=float(np.std(re, ddof=ddof) / np.sqrt(n)),
        se_rate_center=np.std(rc, axis=0, ddof=ddof) / np.sqrt(n),
        rout_edge_literal=float(_rout(oe, re, "literal")),
        rout_center_literal=_rout(oc, rc, "literal"),
        rout_edge_per_trial=float(_rout(oe, re, "per_trial")),
        rout_center_per_trial=_rout(oc, rc, "per_trial"),
        batch_rout_edge=batch_e,
        batch_rout_center=batch_c,
    )


def run_schemes(topology: NetworkTopology, schemes, split_ratio: float | None = None,
                n_trials: int = 10_000, seed: int = 0, workers: int = 1) -> dict[str, Estimates]:
    """Estimate every scheme on common channel draws (same seed, same streams)."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    schemes = list(dict.fromkeys(schemes))
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; expected one of {SCHEMES}")

    groups: dict[int, list[str]] = {}
    topo_of = {s: scheme_topology(topology, s) for s in schemes}
    for s in schemes:
        groups.setdefault(topo_of[s].coop_count, []).append(s)

    tasks = []
    for members in groups.values():
        topo = topo_of[members[0]]
        tasks += [(topo, tuple(members), split_ratio, seed, a, b) for a, b in _chunks(n_trials)]

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_chunk, tasks))
    else:
        results = [_simulate_chunk(t) for t in tasks]

    per_scheme: dict[str, list] = {s: [] for s in schemes}
    for task, res in zip(tasks, results):
        for s, arrays in res.items():
            per_scheme[s].append(arrays)

    estimates = {}
    for s in schemes:
        parts = per_scheme[s]
        re, rc, oe, oc = (np.concatenate([p[k] for p in parts]) for k in range(4))
        topo = topo_of[s]
        modes = assign_modes(topo, phase_scheme(s), split_ratio)
        estimates[s] = _estimates(s, topo, n_trials, seed, split_ratio, modes, re, rc, oe, oc)
    return estimates


def run_trials(topology: NetworkTopology, scheme: str = "ec", split_ratio: float | None = None,
               n_trials: int = 10_000, seed: int = 0, workers: int = 1) -> Estimates:
    return run_schemes(topology, [scheme], split_ratio, n_trials, seed, workers)[scheme]


def outage_sum_rate(estimates: Estimates) -> float:
    return float(np.sum(estimates.rout_center) + estimates.rout_edge)


def _ee(rout_center, rout_edge, topology: NetworkTopology, active_elements) -> float:
    p = topology.power
    P = p.pt_watts
    coop = topology.coop_mask
    ris_power = np.asarray(active_elements) * p.p_ele_watts
    base = P / p.lambda_amp + p.p_q_watts
    center_den = base + np.where(coop, 0.0, ris_power) if topology.charge_all_ris else base
    center = np.sum(rout_center / center_den)
    edge = np.sum(np.where(coop, rout_edge / (base + ris_power), 0.0))
    return float(center + edge)


def energy_efficiency(estimates: Estimates, topology: NetworkTopology | None = None) -> float:
    """Outage-rate-weighted energy efficiency in bits/J/Hz.

    Each cooperative BS counts the edge user's outage rate once against its
    own transmit, static and RIS power. RIS power is the number of active
    elements times the per-element power; with ``charge_all_ris`` the
    non-cooperative RIS power is charged to that cell's center term.
    """
    topology = topology or estimates.topology
    return _ee(estimates.rout_center, estimates.rout_edge, topology, estimates.active_elements)


def outage_sum_rate_stderr(estimates: Estimates) -> float:
    """Batch-means standard error (NaN with fewer than two batches)."""
    b = estimates.batch_rout_center.sum(axis=1) + estimates.batch_rout_edge
    if len(b) < 2:
        return float("nan")
    return float(np.std(b, ddof=1) / np.sqrt(len(b)))


def energy_efficiency_stderr(estimates: Estimates, topology: NetworkTopology | None = None) -> float:
    topology = topology or estimates.topology
    b = np.array([_ee(c, e, topology, estimates.active_elements)
                  for c, e in zip(estimates.batch_rout_center, estimates.batch_rout_edge)])
    if len(b) < 2:
        return float("nan")
    return float(np.std(b, ddof=1) / np.sqrt(len(b)))


def default_workers() -> int:
    return os.cpu_count() or 1
