# Run reports: check rows, long-format CSV and the JSON manifest
import hashlib
import json
import logging
import os
import platform
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import scipy

from .. import __version__
from .settings import ExperimentConfig

logger = logging.getLogger(__name__)

CHECK_COLUMNS = ["name", "estimate", "se", "tolerance", "passed", "inconclusive"]


def versions() -> Dict[str, str]:
    return {
        "sbmre": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


class CheckList:
    """Collects acceptance checks; each name may appear once."""

    def __init__(self):
        self.rows: List[dict] = []

    def add(self, name: str, estimate: float, passed: bool, se: float = np.nan,
            tolerance: float = np.nan, inconclusive: bool = False):
        """Records one check; an inconclusive check never passes."""
        if any(row["name"] == name for row in self.rows):
            raise ValueError(f"check {name!r} recorded twice")
        passed = bool(passed) and not inconclusive
        self.rows.append({"name": name, "estimate": float(estimate), "se": float(se),
                          "tolerance": float(tolerance), "passed": passed,
                          "inconclusive": bool(inconclusive)})
        verdict = "INCONCLUSIVE" if inconclusive else ("PASS" if passed else "FAIL")
        logger.info("check %-40s %s (estimate %.6g)", name, verdict, estimate)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=CHECK_COLUMNS)


@dataclass
class RunReport:
    config: ExperimentConfig
    config_hash: str
    checks: pd.DataFrame
    data: Dict[str, pd.DataFrame]
    wall_clock: float
    versions: Dict[str, str] = field(default_factory=versions)
    workers: int = 1
    source: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.checks["passed"].all()) if len(self.checks) else True

    @property
    def failures(self) -> List[str]:
        return list(self.checks.loc[~self.checks["passed"], "name"])


def _long(frame: pd.DataFrame, section: str, config_hash: str) -> pd.DataFrame:
    """One row per cell: (config_hash, section, name, key, value); name is the row label."""
    flat = frame.reset_index(drop=True)
    label = flat.columns[0]
    rows = []
    for _, row in flat.iterrows():
        for key in flat.columns[1:]:
            rows.append((config_hash, section, str(row[label]), str(key), row[key]))
    return pd.DataFrame(rows, columns=["config_hash", "section", "name", "key", "value"])


def report_frame(report: RunReport) -> pd.DataFrame:
    parts = [_long(report.checks, "checks", report.config_hash)]
    for section in sorted(report.data):
        frame = report.data[section]
        if len(frame):
            parts.append(_long(frame, section, report.config_hash))
    return pd.concat(parts, ignore_index=True)


def csv_bytes(report: RunReport) -> bytes:
    return report_frame(report).to_csv(index=False, float_format="%.12g").encode("utf-8")


def write_report(report: RunReport, out_dir: Optional[str] = None) -> Dict[str, str]:
    """Writes <name>.csv and <name>.manifest.json; returns their paths."""
    out_dir = out_dir or report.config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    body = csv_bytes(report)
    csv_path = os.path.join(out_dir, f"{report.config.name}.csv")
    with open(csv_path, "wb") as handle:
        handle.write(body)
    manifest = {
        "experiment": report.config.name,
        "config_hash": report.config_hash,
        "config": report.config.text,
        "seed": report.config.seed,
        "workers": report.workers,
        "versions": report.versions,
        "config_path": report.source,
        "csv": os.path.basename(csv_path),
        "csv_sha256": hashlib.sha256(body).hexdigest(),
        "passed": report.passed,
        "wall_clock": report.wall_clock,
    }
    manifest_path = os.path.join(out_dir, f"{report.config.name}.manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    logger.info("wrote %s and %s", csv_path, manifest_path)
    return {"csv": csv_path, "manifest": manifest_path}
