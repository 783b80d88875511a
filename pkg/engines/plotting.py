"""SVG projections of trajectory CSV files."""

from typing import Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from engines.errors import ConfigError  # noqa: E402
from utils import config  # noqa: E402
from utils.logger import log_info  # noqa: E402

PROJECTIONS = ("xy", "xz", "yz", "3d-isometric")

# orthographic view along (1, 1, 1)
_ISO_E1 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
_ISO_E2 = np.array([-1.0, -1.0, 2.0]) / np.sqrt(6.0)


def project(frame: pd.DataFrame, proj: str) -> Tuple[np.ndarray, np.ndarray, str, str]:
    """Planar coordinates of the samples and the axis labels."""
    if proj == "xy":
        return frame["x1"].values, frame["x2"].values, "x1", "x2"
    if proj == "xz":
        return frame["x1"].values, frame["x3"].values, "x1", "x3"
    if proj == "yz":
        return frame["x2"].values, frame["x3"].values, "x2", "x3"
    if proj == "3d-isometric":
        points = frame[["x1", "x2", "x3"]].values
        return points @ _ISO_E1, points @ _ISO_E2, "iso-u", "iso-v"
    raise ConfigError(f"projection must be one of {PROJECTIONS}, got {proj!r}")


def plot_projection(frame: pd.DataFrame, proj: str, out: str) -> str:
    """Render a polyline projection to `out`; identical input gives identical bytes."""
    u, v, xlabel, ylabel = project(frame, proj)
    with plt.rc_context({"svg.hashsalt": config.SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.0, 6.0))
        ax.plot(u, v, color="tab:blue", linewidth=1.0)
        ax.plot(u[:1], v[:1], marker="o", color="tab:red", markersize=4)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(True, linewidth=0.3)
        ax.set_title(f"trajectory ({proj}, {len(frame)} samples)")
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    log_info(f"Plot: {proj} projection written to {out}")
    return out
