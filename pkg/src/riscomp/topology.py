"""Static network description: distances, exponents, powers and thresholds.

Configuration values are kept in the units the user writes them in (dBm,
dB); everything consumed by the simulator is exposed in linear units
through properties and helper methods.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import rng

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

NOISE_DBM_PER_HZ = -174.0

LINK_KINDS = ("center", "center_foreign", "edge", "bs_ris", "ris_edge")
EXPONENT_KEYS = ("ris", "center", "edge", "ici")

DEFAULT_DISTANCES = {
    "center": 50.0,
    "center_foreign": 200.0,
    "edge": 150.0,
    "bs_ris": 75.0,
    "ris_edge": 75.0,
}
DEFAULT_EXPONENTS = {"ris": 2.7, "center": 3.0, "edge": 3.5, "ici": 4.0}

# Table I and the simulation setup
DEFAULTS: dict[str, Any] = {
    "cells": 6,
    "coop": 4,
    "ris_elements": 70,
    "pt_dbm": 0.0,
    "zeta": 0.7,
    "p_q_dbm": 30.0,
    "p_ele_dbm": 5.0,
    "lambda": 0.4,
    "bandwidth_hz": 10e6,
    "rho_o_db": -30.0,
    "kappa_db": 3.0,
    "rate_center": 1.0,
    "rate_edge": 0.5,
    "topology_seed": 1,
    "eo_noncoop_mode": "off",
    "rout_mode": "literal",
    "charge_all_ris": False,
}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def dbm_to_watts(p_dbm):
    """dBm to watts; scalars stay scalars, sequences become arrays."""
    if np.ndim(p_dbm):
        return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)
    return 10.0 ** ((float(p_dbm) - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class PowerModel:
    pt_dbm: tuple[float, ...]
    zeta: tuple[float, ...]
    p_q_dbm: float = 30.0
    p_ele_dbm: float = 5.0
    lambda_amp: float = 0.4
    bandwidth_hz: float = 10e6
    noise_dbm_per_hz: float = NOISE_DBM_PER_HZ

    @property
    def pt_watts(self) -> np.ndarray:
        return dbm_to_watts(np.asarray(self.pt_dbm, dtype=float))

    @property
    def zeta_array(self) -> np.ndarray:
        return np.asarray(self.zeta, dtype=float)

    @property
    def p_q_watts(self) -> float:
        return dbm_to_watts(self.p_q_dbm)

    @property
    def p_ele_watts(self) -> float:
        return dbm_to_watts(self.p_ele_dbm)


def noise_power(power_model: PowerModel) -> float:
    """Receiver noise power in watts for the configured bandwidth."""
    if power_model.bandwidth_hz <= 0:
        raise ConfigError("bandwidth_hz", "must be positive")
    return dbm_to_watts(power_model.noise_dbm_per_hz + 10.0 * math.log10(power_model.bandwidth_hz))


@dataclass(frozen=True)
class Thresholds:
    rate_center: float
    rate_edge: float

    @property
    def gamma_hat_c(self) -> float:
        return 2.0**self.rate_center - 1.0

    @property
    def gamma_hat_f(self) -> float:
        return 2.0**self.rate_edge - 1.0


@dataclass(frozen=True)
class NetworkTopology:
    """One network instance.

    Base stations are indexed ``0..I-1``; the cooperative set is the first
    ``J`` of them. BS ``i`` owns RIS ``i`` and center user ``i``; the single
    edge user is shared by all cells.
    """

    cell_count: int
    coop_count: int
    ris_elements: int
    power: PowerModel
    thresholds: Thresholds
    distances: Mapping[str, tuple[float, ...]]
    exponents: Mapping[str, float]
    rho_o_db: float = -30.0
    kappa_db: float = 3.0
    topology_seed: int = 1
    eo_noncoop_mode: str = "off"
    rout_mode: str = "literal"
    charge_all_ris: bool = False
    aoa: tuple[tuple[float, float], ...] = field(default=(), compare=False)

    @property
    def rho_o(self) -> float:
        return db_to_linear(self.rho_o_db)

    @property
    def rician_kappa(self) -> float:
        return db_to_linear(self.kappa_db)

    @property
    def noise_watts(self) -> float:
        return noise_power(self.power)

    @property
    def coop_mask(self) -> np.ndarray:
        return np.arange(self.cell_count) < self.coop_count

    @property
    def aoa_arrival(self) -> np.ndarray:
        return np.array([a for a, _ in self.aoa])

    @property
    def aoa_departure(self) -> np.ndarray:
        return np.array([d for _, d in self.aoa])

    def link_table(self) -> dict[tuple[str, int, str], tuple[float, float]]:
        """Every physical link as ``(kind, bs, endpoint) -> (distance, exponent)``."""
        I = self.cell_count
        ex = self.exponents
        table = {}
        for b in range(I):
            for u in range(I):
                if b == u:
                    table[("center", b, f"center{u}")] = (self.distances["center"][b], ex["center"])
                else:
                    table[("center_foreign", b, f"center{u}")] = (
                        self.distances["center_foreign"][b], ex["ici"])
            edge_alpha = ex["edge"] if b < self.coop_count else ex["ici"]
            table[("edge", b, "edge")] = (self.distances["edge"][b], edge_alpha)
            if self.ris_elements > 0:
                table[("bs_ris", b, f"ris{b}")] = (self.distances["bs_ris"][b], ex["ris"])
                table[("ris_edge", b, "edge")] = (self.distances["ris_edge"][b], ex["ris"])
        return table

    def link(self, kind: str, bs: int, endpoint: str) -> tuple[float, float]:
        try:
            return self.link_table()[(kind, bs, endpoint)]
        except KeyError:
            raise KeyError(f"no link {kind!r} from BS {bs} to {endpoint!r}") from None

    def center_links(self) -> tuple[np.ndarray, np.ndarray]:
        """Distances and exponents for BS -> center user, shape ``(bs, user)``."""
        I = self.cell_count
        own = np.eye(I, dtype=bool)
        d = np.where(own, np.asarray(self.distances["center"])[:, None],
                     np.asarray(self.distances["center_foreign"])[:, None])
        a = np.where(own, self.exponents["center"], self.exponents["ici"])
        return d, a

    def edge_links(self) -> tuple[np.ndarray, np.ndarray]:
        d = np.asarray(self.distances["edge"], dtype=float)
        a = np.where(self.coop_mask, self.exponents["edge"], self.exponents["ici"])
        return d, a

    def with_(self, **changes) -> "NetworkTopology":
        """Rebuild with config-level overrides (revalidated)."""
        cfg = self.to_config()
        for key, value in changes.items():
            if key in ("distances", "exponents"):
                cfg[key] = {**cfg[key], **value}
            else:
                cfg[key] = value
        return build_topology(cfg)

    def to_config(self) -> dict[str, Any]:
        """Serialized form accepted by :func:`build_topology`."""
        p = self.power
        return {
            "cells": self.cell_count,
            "coop": self.coop_count,
            "ris_elements": self.ris_elements,
            "pt_dbm": _compact(p.pt_dbm),
            "zeta": _compact(p.zeta),
            "p_q_dbm": p.p_q_dbm,
            "p_ele_dbm": p.p_ele_dbm,
            "lambda": p.lambda_amp,
            "bandwidth_hz": p.bandwidth_hz,
            "rho_o_db": self.rho_o_db,
            "kappa_db": self.kappa_db,
            "rate_center": self.thresholds.rate_center,
            "rate_edge": self.thresholds.rate_edge,
            "topology_seed": self.topology_seed,
            "eo_noncoop_mode": self.eo_noncoop_mode,
            "rout_mode": self.rout_mode,
            "charge_all_ris": self.charge_all_ris,
            "distances": {k: _compact(v) for k, v in self.distances.items()},
            "exponents": dict(self.exponents),
        }


def _compact(values: tuple[float, ...]):
    return values[0] if len(set(values)) == 1 else list(values)


def _per_bs(key: str, value, count: int) -> tuple[float, ...]:
    if np.ndim(value) == 0:
        return (float(value),) * count
    values = tuple(float(v) for v in value)
    if len(values) != count:
        raise ConfigError(key, f"expected {count} per-BS values, got {len(values)}")
    return values


def _draw_aoa(seed: int, count: int) -> tuple[tuple[float, float], ...]:
    u = rng.uniforms(rng.derive_key(seed, "aoa"), 0, 1, 2 * count)[0]
    omega = (1.0 - u) * np.pi - np.pi / 2
    omega = np.where(omega >= np.pi / 2, -np.pi / 2, omega)
    return tuple((float(omega[r]), float(omega[count + r])) for r in range(count))


def build_topology(config: Mapping[str, Any] | None = None) -> NetworkTopology:
    """Validate a config mapping (missing keys take the defaults)."""
    config = dict(config or {})
    unknown = set(config) - set(DEFAULTS) - {"distances", "exponents"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    cfg = {**DEFAULTS, **config}

    def integer(key):
        v = cfg[key]
        if isinstance(v, bool) or not float(v).is_integer():
            raise ConfigError(key, f"must be an integer, got {v!r}")
        return int(v)

    I, J, K = integer("cells"), integer("coop"), integer("ris_elements")
    if I < 1:
        raise ConfigError("cells", "must be at least 1")
    if not 1 <= J <= I:
        raise ConfigError("coop", f"must satisfy 1 <= coop <= cells ({I}), got {J}")
    if K < 0:
        raise ConfigError("ris_elements", "must be non-negative")

    zeta = _per_bs("zeta", cfg["zeta"], I)
    for z in zeta:
        if not 0.5 < z < 1.0:
            raise ConfigError("zeta", f"must lie in (0.5, 1), got {z}")
    lam = float(cfg["lambda"])
    if not 0.0 < lam <= 1.0:
        raise ConfigError("lambda", f"must lie in (0, 1], got {lam}")
    bandwidth = float(cfg["bandwidth_hz"])
    if not bandwidth > 0:
        raise ConfigError("bandwidth_hz", "must be positive")
    for key in ("rate_center", "rate_edge"):
        if not float(cfg[key]) > 0:
            raise ConfigError(key, "must be positive")
    for key in ("pt_dbm", "p_q_dbm", "p_ele_dbm", "rho_o_db", "kappa_db"):
        if not np.all(np.isfinite(np.asarray(cfg[key], dtype=float))):
            raise ConfigError(key, "must be finite")
    if cfg["eo_noncoop_mode"] not in ("off", "random"):
        raise ConfigError("eo_noncoop_mode", "must be 'off' or 'random'")
    if cfg["rout_mode"] not in ("literal", "per_trial"):
        raise ConfigError("rout_mode", "must be 'literal' or 'per_trial'")

    dist_cfg = dict(config.get("distances", {}))
    for k in dist_cfg:
        if k not in LINK_KINDS:
            raise ConfigError(f"distances.{k}", "unknown link kind")
    distances = {}
    for kind in LINK_KINDS:
        values = _per_bs(f"distances.{kind}", dist_cfg.get(kind, DEFAULT_DISTANCES[kind]), I)
        if min(values) <= 0:
            raise ConfigError(f"distances.{kind}", "distances must be positive")
        distances[kind] = values

    exp_cfg = dict(config.get("exponents", {}))
    for k in exp_cfg:
        if k not in EXPONENT_KEYS:
            raise ConfigError(f"exponents.{k}", "unknown exponent class")
    exponents = {k: float(exp_cfg.get(k, DEFAULT_EXPONENTS[k])) for k in EXPONENT_KEYS}
    for k, v in exponents.items():
        if v < 2:
            raise ConfigError(f"exponents.{k}", f"path-loss exponent must be >= 2, got {v}")

    seed = integer("topology_seed")
    if seed < 0:
        raise ConfigError("topology_seed", "must be non-negative")

    power = PowerModel(
        pt_dbm=_per_bs("pt_dbm", cfg["pt_dbm"], I),
        zeta=zeta,
        p_q_dbm=float(cfg["p_q_dbm"]),
        p_ele_dbm=float(cfg["p_ele_dbm"]),
        lambda_amp=lam,
        bandwidth_hz=bandwidth,
    )
    return NetworkTopology(
        cell_count=I,
        coop_count=J,
        ris_elements=K,
        power=power,
        thresholds=Thresholds(float(cfg["rate_center"]), float(cfg["rate_edge"])),
        distances=distances,
        exponents=exponents,
        rho_o_db=float(cfg["rho_o_db"]),
        kappa_db=float(cfg["kappa_db"]),
        topology_seed=seed,
        eo_noncoop_mode=cfg["eo_noncoop_mode"],
        rout_mode=cfg["rout_mode"],
        charge_all_ris=bool(cfg["charge_all_ris"]),
        aoa=_draw_aoa(seed, I),
    )


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a TOML config file into a plain mapping."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}") from None


def describe(topology: NetworkTopology) -> dict[str, Any]:
    """Resolved parameters in both configured and linear units."""
    p = topology.power
    return {
        **topology.to_config(),
        "noise_dbm": watts_to_dbm(topology.noise_watts),
        "noise_watts": topology.noise_watts,
        "rho_o_linear": topology.rho_o,
        "kappa_linear": topology.rician_kappa,
        "p_q_watts": p.p_q_watts,
        "p_ele_watts": p.p_ele_watts,
        "p_ris_watts": topology.ris_elements * p.p_ele_watts,
        "gamma_hat_c": topology.thresholds.gamma_hat_c,
        "gamma_hat_f": topology.thresholds.gamma_hat_f,
        "aoa_rad": [list(a) for a in topology.aoa],
    }


__all__ = [
    "ConfigError", "PowerModel", "Thresholds", "NetworkTopology", "build_topology",
    "load_config", "dbm_to_watts", "watts_to_dbm", "noise_power", "describe", "DEFAULTS",
]
