"""Static figures rendered from sweep rows (CSV is the source of truth)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .montecarlo import SCHEME_LABELS  # noqa: E402

_LINE = {
    "sweep-j": ("coop", "energy_efficiency", "Number of cooperative BSs J",
                "Energy efficiency (bits/J/Hz)"),
    "sweep-k": ("elements", "energy_efficiency", "Number of RIS elements K",
                "Energy efficiency (bits/J/Hz)"),
    "sweep-pt": ("pt_dbm", "outage_sum_rate", "Transmit power P_t (dBm)",
                 "Outage sum rate (bps/Hz)"),
    "split-ratio": ("ratio", "outage_sum_rate", "CO/EO split ratio",
                    "Outage sum rate (bps/Hz)"),
    "point": ("coop", "energy_efficiency", "Number of cooperative BSs J",
              "Energy efficiency (bits/J/Hz)"),
}


def _rows(result) -> list[dict]:
    if isinstance(result, list):
        return result
    return [r.row() for r in result.records]


def _save(fig, path: Path, fmt: str) -> Path:
    path = path.with_suffix("." + fmt)
    if fmt == "svg":
        plt.rcParams["svg.hashsalt"] = "riscomp"
        fig.savefig(path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(path, format=fmt, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return path


def render_plots(result, kind: str, path, formats=("png",)) -> list[Path]:
    """Line chart per scheme (or per J for split-ratio); filled contour for the power/threshold grid."""
    rows = _rows(result)
    if not rows:
        raise ValueError("nothing to plot: the sweep result is empty")
    path = Path(path)
    written = []
    for fmt in formats:
        fig, ax = plt.subplots(figsize=(6, 4))
        if kind == "contour":
            pts = sorted({r["pt_dbm"] for r in rows})
            rths = sorted({r["rth"] for r in rows})
            scheme = rows[0]["scheme"]
            grid = np.full((len(rths), len(pts)), np.nan)
            for r in rows:
                if r["scheme"] == scheme:
                    grid[rths.index(r["rth"]), pts.index(r["pt_dbm"])] = r["energy_efficiency"]
            if len(pts) > 1 and len(rths) > 1:
                cs = ax.contourf(pts, rths, grid, levels=12, cmap="viridis")
            else:
                cs = ax.pcolormesh(pts, rths, grid, cmap="viridis", shading="nearest")
            fig.colorbar(cs, ax=ax, label="Energy efficiency (bits/J/Hz)")
            ax.set_xlabel("Transmit power P_t (dBm)")
            ax.set_ylabel("Rate threshold R_th (bps/Hz)")
        else:
            xkey, ykey, xlabel, ylabel = _LINE[kind]
            if kind == "split-ratio":
                groups = {f"J = {int(c)}": [r for r in rows if r["coop"] == c]
                          for c in sorted({r["coop"] for r in rows})}
            else:
                schemes = list(dict.fromkeys(r["scheme"] for r in rows))
                groups = {SCHEME_LABELS.get(s, s): [r for r in rows if r["scheme"] == s] for s in schemes}
            for label, grp in groups.items():
                grp = sorted(grp, key=lambda r: r[xkey])
                ax.plot([r[xkey] for r in grp], [r[ykey] for r in grp], marker="o", label=label)
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.grid(True, alpha=0.3)
            ax.legend()
        fig.tight_layout()
        written.append(_save(fig, path, fmt))
    return written
