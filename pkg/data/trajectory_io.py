"""Trajectory CSV emission and parsing (header t,x1,x2,x3,v1,v2,v3,energy)."""

import io
import json
from typing import Optional

import numpy as np
import pandas as pd

from engines.dynamics import Trajectory
from engines.errors import ConfigError
from utils import config
from utils.logger import log_info


def trajectory_to_csv(trajectory: Trajectory) -> str:
    buffer = io.StringIO()
    trajectory.to_frame().to_csv(buffer, index=False, float_format=config.CSV_FLOAT_FORMAT,
                                 lineterminator="\n")
    return buffer.getvalue()


def write_trajectory_csv(trajectory: Trajectory, path: str) -> str:
    text = trajectory_to_csv(trajectory)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    log_info(f"Wrote {len(trajectory)} samples to {path}")
    return path


def trajectory_to_json(trajectory: Trajectory) -> str:
    frame = trajectory.to_frame()
    return json.dumps({"columns": list(frame.columns), "rows": frame.values.tolist(),
                       "meta": trajectory.meta})


def write_trajectory_json(trajectory: Trajectory, path: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trajectory_to_json(trajectory))
    log_info(f"Wrote {len(trajectory)} samples to {path}")
    return path


def read_trajectory_csv(path: str) -> pd.DataFrame:
    """
    Load and validate a trajectory CSV.

    Raises:
        ConfigError: missing file, wrong header, non-numeric cells, no rows,
            or times that are not strictly increasing
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot parse trajectory CSV {path}: {e}") from e
    if list(frame.columns) != config.TRAJECTORY_COLUMNS:
        raise ConfigError(f"{path}: expected columns {config.TRAJECTORY_COLUMNS}, got {list(frame.columns)}")
    if frame.empty:
        raise ConfigError(f"{path}: no samples")
    try:
        frame = frame.astype(float)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: non-numeric entries") from e
    if not np.all(np.isfinite(frame.values)):
        raise ConfigError(f"{path}: non-finite entries")
    if len(frame) > 1 and not np.all(np.diff(frame["t"].values) > 0.0):
        raise ConfigError(f"{path}: times are not strictly increasing")
    return frame


def summary(trajectory: Trajectory, error: Optional[str] = None) -> dict:
    """Run summary printed by the geodesic command."""
    out = {
        "samples": len(trajectory),
        "energy_drift": trajectory.energy_drift(),
        "accepted_steps": trajectory.accepted,
        "rejected_steps": trajectory.rejected,
        "truncated": trajectory.truncated,
    }
    if len(trajectory):
        out["t_final"] = float(trajectory.t[-1])
        out["x_final"] = [float(c) for c in trajectory.x[-1]]
    if error is not None:
        out["error"] = error
    return out
