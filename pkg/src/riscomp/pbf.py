"""Closed-form RIS phase design.

Each element of RIS ``r`` reflects only BS ``r``'s signal toward the edge
user. Enhancement (EO) rotates the cascaded term onto the direct path;
cancellation (CO) rotates it by a further half turn so it opposes the
direct path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import rng
from .channel import ChannelRealization
from .topology import NetworkTopology


class Mode(enum.IntEnum):
    OFF = 0
    EO = 1
    CO = 2
    RANDOM = 3


class Scheme(str, enum.Enum):
    NONE = "none"
    RANDOM = "random"
    EO = "eo"
    EC = "ec"


def wrap_phase(y):
    """Map angles onto [-pi, pi)."""
    w = np.mod(np.asarray(y, dtype=float) + np.pi, 2 * np.pi) - np.pi
    w = np.where(w >= np.pi, -np.pi, w)
    return float(w) if w.ndim == 0 else w


def eo_phase(direct, cascade_element):
    """Phase aligning ``cascade_element * exp(j theta)`` with ``direct``.

    Equals ``arg(direct) - arg(cascade_element)`` wrapped onto [-pi, pi). A
    zero cascade element has no defined argument and gets phase 0 (see
    :func:`degenerate`).
    """
    cascade_element = np.asarray(cascade_element)
    theta = np.angle(direct * np.conj(cascade_element))
    theta = np.where(theta >= np.pi, -np.pi, theta)
    theta = np.where(cascade_element == 0, 0.0, theta)
    return float(theta) if theta.ndim == 0 else theta


def _half_turn(theta):
    # wrap(theta + pi) for theta already in [-pi, pi); tiny negative theta
    # rounds up to exactly +pi, which belongs to -pi
    turned = np.where(theta >= 0, theta - np.pi, theta + np.pi)
    return np.where(turned >= np.pi, -np.pi, turned)


def co_phase(direct, cascade_element):
    """Enhancement phase turned by pi: the cascaded term opposes ``direct``."""
    cascade_element = np.asarray(cascade_element)
    theta = _half_turn(np.asarray(eo_phase(direct, cascade_element)))
    theta = np.where(cascade_element == 0, 0.0, theta)
    return float(theta) if theta.ndim == 0 else theta


def degenerate(cascade_element) -> np.ndarray:
    return np.asarray(cascade_element) == 0


def assign_modes(topology: NetworkTopology, scheme, split_ratio: float | None = None) -> np.ndarray:
    """Per-RIS, per-element :class:`Mode` codes, shape ``(I, K)``.

    With ``split_ratio`` every RIS puts its lowest ``floor(s K)`` elements in
    CO mode and the rest in EO mode, whatever ``scheme`` says.
    """
    scheme = Scheme(scheme)
    I, K = topology.cell_count, topology.ris_elements
    coop = topology.coop_mask[:, None]
    if split_ratio is not None:
        if not 0.0 <= split_ratio <= 1.0:
            raise ValueError(f"split_ratio must lie in [0, 1], got {split_ratio}")
        n_co = int(np.floor(split_ratio * K))
        row = np.where(np.arange(K) < n_co, Mode.CO, Mode.EO)
        return np.broadcast_to(row, (I, K)).astype(np.int8)

    if scheme is Scheme.NONE:
        modes = Mode.OFF
    elif scheme is Scheme.RANDOM:
        modes = Mode.RANDOM
    elif scheme is Scheme.EO:
        idle = Mode.RANDOM if topology.eo_noncoop_mode == "random" else Mode.OFF
        modes = np.where(coop, Mode.EO, idle)
    else:
        modes = np.where(coop, Mode.EO, Mode.CO)
    return np.broadcast_to(modes, (I, K)).astype(np.int8)


@dataclass(frozen=True)
class PhasePlan:
    """Phases ``(..., I, K)`` on [-pi, pi) plus the mode map ``(I, K)``.

    OFF elements carry phase 0 and are dropped from the cascade.
    """

    phases: np.ndarray
    modes: np.ndarray
    degenerate: np.ndarray

    @property
    def active(self) -> np.ndarray:
        return self.modes != Mode.OFF

    def records(self):
        for r in range(self.modes.shape[0]):
            yield f"phase/ris{r}", self.phases[..., r, :].ravel()
            yield f"mode/ris{r}", self.modes[r].astype(float)


def build_phase_plan(realization: ChannelRealization, modes: np.ndarray, seed: int = 0) -> PhasePlan:
    """Apply per-element rules against each RIS's own BS and the edge user.

    RANDOM elements draw from the counter-based stream ``(seed, phase/ris r)``
    at the realization's trial indices.
    """
    modes = np.asarray(modes)
    cascade = realization.ris_edge * realization.bs_ris
    direct = realization.edge[..., :, None]
    if cascade.shape[-2:] != modes.shape:
        raise ValueError(f"mode map {modes.shape} does not match channels {cascade.shape[-2:]}")

    phases = np.zeros(np.broadcast_shapes(cascade.shape, modes.shape))
    if np.any((modes == Mode.EO) | (modes == Mode.CO)):
        eo = eo_phase(direct, cascade)
        co = np.where(cascade == 0, 0.0, _half_turn(eo))
        phases = np.where(modes == Mode.EO, eo, phases)
        phases = np.where(modes == Mode.CO, co, phases)

    if np.any(modes == Mode.RANDOM):
        batched = realization.edge.ndim == 2
        start = int(realization.trials[0])
        stop = start + (realization.edge.shape[0] if batched else 1)
        K = modes.shape[1]
        rand = np.empty((stop - start,) + modes.shape)
        for r in range(modes.shape[0]):
            rand[:, r] = rng.phases(rng.derive_key(seed, f"phase/ris{r}"), start, stop, K)
        if not batched:
            rand = rand[0]
        phases = np.where(modes == Mode.RANDOM, rand, phases)

    degen = degenerate(cascade) & ((modes == Mode.EO) | (modes == Mode.CO))
    return PhasePlan(np.asarray(phases, dtype=float), modes, degen)
