"""Small-scale fading draws for every link of the network.

Direct BS-user links are Rayleigh; the BS->RIS and RIS->edge vectors are
Rician with a uniform-linear-array line-of-sight steering component. Path
gain is applied as an amplitude factor on the whole draw.

Arrays carry a leading trial axis when produced by :func:`realize_batch`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .topology import NetworkTopology


def path_gain(d, alpha, rho_o):
    """Linear large-scale power gain ``rho_o / d**alpha``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    g = rho_o / d**alpha
    return float(g) if g.ndim == 0 else g


def rayleigh_scalar(stream: np.random.Generator, size=None):
    """CN(0, 1) sample(s): independent N(0, 1/2) real and imaginary parts."""
    re = stream.standard_normal(size)
    im = stream.standard_normal(size)
    return (re + 1j * im) / np.sqrt(2.0)


def los_steering(K: int, omega: float) -> np.ndarray:
    """Steering vector with entries ``exp(j (k-1) pi sin(omega))``, k = 1..K."""
    if K < 1:
        raise ValueError("steering vector needs at least one element")
    return np.exp(1j * np.pi * np.arange(K) * np.sin(omega))


def rician_vector(K: int, kappa: float, omega: float, stream=None, nlos=None) -> np.ndarray:
    """Unit-power Rician vector (path gain not applied).

    ``nlos`` may carry pre-drawn CN(0, 1) samples with trailing length ``K``;
    otherwise they are drawn from ``stream``.
    """
    if kappa < 0:
        raise ValueError("Rician factor must be non-negative")
    if nlos is None:
        nlos = rayleigh_scalar(stream, K)
    los = los_steering(K, omega)
    return np.sqrt(kappa / (1 + kappa)) * los + np.sqrt(1 / (1 + kappa)) * nlos


@dataclass(frozen=True)
class ChannelRealization:
    """Channel draws for one trial, or a batch of trials on the leading axis.

    center:   (..., bs, user) BS -> center user scalars
    edge:     (..., bs)       BS -> edge user scalars
    bs_ris:   (..., ris, K)   BS_r -> RIS_r vectors
    ris_edge: (..., ris, K)   RIS_r -> edge user vectors
    """

    center: np.ndarray
    edge: np.ndarray
    bs_ris: np.ndarray
    ris_edge: np.ndarray
    trials: np.ndarray

    @property
    def n_trials(self) -> int:
        return len(self.trials)

    def trial(self, t: int) -> "ChannelRealization":
        """Slice one trial out of a batch (by position)."""
        return ChannelRealization(self.center[t], self.edge[t], self.bs_ris[t],
                                  self.ris_edge[t], self.trials[t:t + 1])

    def links(self):
        """Iterate ``(link id, complex values)`` in a stable order (single trial)."""
        I = self.edge.shape[-1]
        for b in range(I):
            for u in range(I):
                yield f"direct/bs{b}/center{u}", np.atleast_1d(self.center[..., b, u])
        for b in range(I):
            yield f"direct/bs{b}/edge", np.atleast_1d(self.edge[..., b])
        for r in range(self.bs_ris.shape[-2]):
            if self.bs_ris.shape[-1]:
                yield f"bs_ris/bs{r}", self.bs_ris[..., r, :].ravel()
                yield f"ris_edge/ris{r}", self.ris_edge[..., r, :].ravel()


def _amplitudes(topology: NetworkTopology):
    rho = topology.rho_o
    d_c, a_c = topology.center_links()
    d_e, a_e = topology.edge_links()
    alpha_r = topology.exponents["ris"]
    return (
        np.sqrt(path_gain(d_c, a_c, rho)),
        np.sqrt(path_gain(d_e, a_e, rho)),
        np.sqrt(path_gain(topology.distances["bs_ris"], alpha_r, rho)),
        np.sqrt(path_gain(topology.distances["ris_edge"], alpha_r, rho)),
    )


def realize_batch(topology: NetworkTopology, seed: int, start: int, stop: int) -> ChannelRealization:
    """Draw trials ``start..stop-1``.

    Each link owns a counter-based stream keyed by ``(seed, link id)`` and
    trial ``t`` reads a fixed slice of it, so any partition of the trial
    range yields bit-identical values.
    """
    I, K = topology.cell_count, topology.ris_elements
    n = stop - start
    amp_c, amp_e, amp_in, amp_out = _amplitudes(topology)

    center = np.empty((n, I, I), dtype=complex)
    for b in range(I):
        for u in range(I):
            key = rng.derive_key(seed, f"direct/bs{b}/center{u}")
            center[:, b, u] = amp_c[b, u] * rng.complex_normals(key, start, stop, 1)[:, 0]

    edge = np.empty((n, I), dtype=complex)
    for b in range(I):
        key = rng.derive_key(seed, f"direct/bs{b}/edge")
        edge[:, b] = amp_e[b] * rng.complex_normals(key, start, stop, 1)[:, 0]

    kappa = topology.rician_kappa
    bs_ris = np.empty((n, I, K), dtype=complex)
    ris_edge = np.empty((n, I, K), dtype=complex)
    if K:
        for r in range(I):
            nlos = rng.complex_normals(rng.derive_key(seed, f"bs_ris/bs{r}"), start, stop, K)
            bs_ris[:, r] = amp_in[r] * rician_vector(K, kappa, topology.aoa[r][0], nlos=nlos)
            nlos = rng.complex_normals(rng.derive_key(seed, f"ris_edge/ris{r}"), start, stop, K)
            ris_edge[:, r] = amp_out[r] * rician_vector(K, kappa, topology.aoa[r][1], nlos=nlos)

    return ChannelRealization(center, edge, bs_ris, ris_edge, np.arange(start, stop))


def realize_channels(topology: NetworkTopology, trial: int, seed: int) -> ChannelRealization:
    """One trial's realization (no leading trial axis)."""
    return realize_batch(topology, seed, trial, trial + 1).trial(0)


def format_record(items) -> str:
    """Text record ``link<TAB>re,im re,im ...`` with 17 significant digits."""
    lines = []
    for link_id, values in items:
        vals = np.asarray(values).ravel()
        if np.iscomplexobj(vals):
            body = " ".join(f"{v.real:.17g},{v.imag:.17g}" for v in vals)
        else:
            body = " ".join(f"{v:.17g}" for v in vals)
        lines.append(f"{link_id}\t{body}")
    return "\n".join(lines) + "\n"


def dump_realization(realization: ChannelRealization) -> str:
    return format_record(realization.links())
