"""SINRs, rates and outage indicators for one realization (or a batch).

Edge user: non-coherent joint transmission from the cooperative BSs, each
through its own RIS-assisted effective channel; non-cooperative BSs
interfere at full power through theirs. Center users see direct links only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .pbf import PhasePlan
from .topology import NetworkTopology, Thresholds


def effective_channel(direct, ris_in, phases, ris_out):
    """``direct + sum_k out_k exp(j theta_k) in_k`` over the trailing axis."""
    ris_in, ris_out, phases = np.asarray(ris_in), np.asarray(ris_out), np.asarray(phases)
    if not ris_in.shape[-1:] == ris_out.shape[-1:] == phases.shape[-1:]:
        raise ValueError(
            f"vector lengths differ: in {ris_in.shape}, phases {phases.shape}, out {ris_out.shape}")
    return direct + np.sum(ris_out * np.exp(1j * phases) * ris_in, axis=-1)


def edge_channels(realization: ChannelRealization, plan: PhasePlan | None) -> np.ndarray:
    """Effective BS -> edge channels, shape ``(..., I)``; OFF elements drop out."""
    if plan is None or realization.bs_ris.shape[-1] == 0:
        return realization.edge
    ris_in = np.where(plan.active, realization.bs_ris, 0.0)
    return effective_channel(realization.edge, ris_in, plan.phases, realization.ris_edge)


@dataclass(frozen=True)
class SinrBundle:
    gamma_edge: np.ndarray
    gamma_center_sic: np.ndarray
    gamma_center: np.ndarray
    y_edge: np.ndarray
    y_center: np.ndarray


def _powers(topology: NetworkTopology):
    return topology.power.pt_watts, topology.power.zeta_array, topology.coop_mask, topology.noise_watts


def _edge_terms(gain, topology):
    P, zeta, coop, noise = _powers(topology)
    y = np.sum(np.where(coop, 0.0, P) * gain, axis=-1)
    num = np.sum(np.where(coop, zeta * P, 0.0) * gain, axis=-1)
    den = np.sum(np.where(coop, (1 - zeta) * P, 0.0) * gain, axis=-1) + y + noise
    return num / den, y


def _center_terms(realization, topology):
    P, zeta, coop, noise = _powers(topology)
    c = np.abs(realization.center) ** 2  # (..., bs, user)
    not_self = ~np.eye(topology.cell_count, dtype=bool)

    def weigh(w):  # w: (bs, user) weights; sum over transmitting BS
        return np.sum(w * c, axis=-2)

    y = weigh(np.where(~coop[:, None] & not_self, P[:, None], 0.0))
    sic_num = weigh(np.where(coop, zeta * P, 0.0)[:, None])
    coop_rest = np.where(coop, (1 - zeta) * P, 0.0)[:, None]
    sic_den = weigh(coop_rest) + y + noise
    own_num = (1 - zeta) * P * np.diagonal(c, axis1=-2, axis2=-1)
    own_den = weigh(coop_rest * not_self) + y + noise
    return sic_num / sic_den, own_num / own_den, y


def sinr_bundle(realization: ChannelRealization, plan: PhasePlan | None,
                topology: NetworkTopology) -> SinrBundle:
    gamma_e, y_e = _edge_terms(np.abs(edge_channels(realization, plan)) ** 2, topology)
    gamma_sic, gamma_c, y_c = _center_terms(realization, topology)
    return SinrBundle(gamma_e, gamma_sic, gamma_c, y_e, y_c)


def sinr_edge(realization, phase_plan, topology):
    return _edge_terms(np.abs(edge_channels(realization, phase_plan)) ** 2, topology)[0]


def sinr_center_sic(realization, topology, cell=None):
    """SINR at center user(s) when decoding the edge signal first."""
    g = _center_terms(realization, topology)[0]
    return g if cell is None else g[..., cell]


def sinr_center(realization, topology, cell=None):
    """SINR at center user(s) for their own signal after SIC."""
    g = _center_terms(realization, topology)[1]
    return g if cell is None else g[..., cell]


def rate(gamma):
    return np.log2(1.0 + np.asarray(gamma, dtype=float))


@dataclass(frozen=True)
class TrialOutcome:
    rate_edge: np.ndarray
    rate_center: np.ndarray
    outage_edge: np.ndarray
    outage_center: np.ndarray
    scheme: str = ""


def outcome_from_sinr(gamma_edge, gamma_sic, gamma_center, thresholds: Thresholds,
                      scheme: str = "") -> TrialOutcome:
    gf, gc = thresholds.gamma_hat_f, thresholds.gamma_hat_c
    return TrialOutcome(
        rate_edge=rate(gamma_edge),
        rate_center=rate(gamma_center),
        outage_edge=~(np.asarray(gamma_edge) > gf),
        outage_center=~((np.asarray(gamma_sic) > gf) & (np.asarray(gamma_center) > gc)),
        scheme=scheme,
    )


def evaluate_trial(realization, phase_plan, topology, thresholds=None, scheme="") -> TrialOutcome:
    thresholds = thresholds or topology.thresholds
    b = sinr_bundle(realization, phase_plan, topology)
    return outcome_from_sinr(b.gamma_edge, b.gamma_center_sic, b.gamma_center, thresholds, scheme)


def oma_sinr(realization, topology, phase_plan=None):
    """Per-slot SINRs of the two-slot orthogonal baseline.

    Edge slot: cooperative BSs send the edge symbol at full power, the others
    serve their own center users and interfere. Center slot: every BS serves
    its center user at full power.
    """
    P, _, coop, noise = _powers(topology)
    gain = np.abs(edge_channels(realization, phase_plan)) ** 2
    y = np.sum(np.where(coop, 0.0, P) * gain, axis=-1)
    gamma_e = np.sum(np.where(coop, P, 0.0) * gain, axis=-1) / (y + noise)

    c = np.abs(realization.center) ** 2
    own = P * np.diagonal(c, axis1=-2, axis2=-1)
    not_self = ~np.eye(topology.cell_count, dtype=bool)
    others = np.sum(np.where(not_self, P[:, None], 0.0) * c, axis=-2)
    gamma_c = own / (others + noise)
    return gamma_e, gamma_c


def evaluate_trial_oma(realization, topology, thresholds=None, phase_plan=None,
                       scheme="oma") -> TrialOutcome:
    """Half of the resources per user; targets doubled so rates stay comparable."""
    thresholds = thresholds or topology.thresholds
    gamma_e, gamma_c = oma_sinr(realization, topology, phase_plan)
    gf = 2.0 ** (2 * thresholds.rate_edge) - 1
    gc = 2.0 ** (2 * thresholds.rate_center) - 1
    return TrialOutcome(
        rate_edge=0.5 * rate(gamma_e),
        rate_center=0.5 * rate(gamma_c),
        outage_edge=~(gamma_e > gf),
        outage_center=~(gamma_c > gc),
        scheme=scheme,
    )
