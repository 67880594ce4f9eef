"""Static SVG figures of efficiency curves."""
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from omegaconf import DictConfig  # noqa: E402

from src.simulation import EfficiencyPoint, SimConfig  # noqa: E402

# Fixed id salt and no date keep reruns byte-identical.
matplotlib.rcParams["svg.hashsalt"] = "scatterlab"
_METADATA = {"Date": None, "Creator": "scatterlab"}


class PlotRenderer:
    """Writes the command line's SVG figures."""

    def __init__(self, output_config: Optional[DictConfig] = None):
        """Initialize with output settings.

        Args:
            output_config: Output section of the configuration; uses plot_dpi.
        """
        self.dpi = int((output_config or {}).get("plot_dpi", 100))

    def _save(self, fig, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", dpi=self.dpi, metadata=_METADATA)
        plt.close(fig)
        return path

    def are_curve(self, path: Path, rhos: Sequence[float], values: Sequence[float], title: str) -> Path:
        """Asymptotic efficiency against rho."""
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(rhos, values, color="black", linewidth=1.5)
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.05)
        ax.set_xlabel("rho")
        ax.set_ylabel("ARE")
        ax.set_title(title)
        return self._save(fig, path)

    def efficiency_curve(self, path: Path, config: SimConfig, points: Sequence[EfficiencyPoint]) -> Path:
        """RE1 (dark) and RE2 (light) against n with the asymptotic value as a horizontal line."""
        ns = [p.n for p in points]
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(ns, [p.re1 for p in points], "o", color="black", markersize=3, label="RE1")
        ax.plot(ns, [p.re2 for p in points], "o", color="0.6", markersize=3, label="RE2")
        if points:
            ax.axhline(points[0].are_asymptotic, color="black", linestyle="--", linewidth=1, label="ARE")
        ax.set_xlabel("n")
        ax.set_ylabel("relative efficiency")
        ax.set_title(f"d={config.d}, d1={config.d1}, gamma={config.gamma:g}")
        ax.legend(loc="best", frameon=False)
        return self._save(fig, path)
