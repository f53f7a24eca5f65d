# Re-running a manifest and checking the CSV comes out byte-identical
import difflib
import hashlib
import json
import logging
import os
from typing import Optional

import pandas as pd

from ..errors import ConfigError, ReplayError
from .experiments import run_experiment
from .report import RunReport, csv_bytes, versions
from .settings import parse_config

logger = logging.getLogger(__name__)


def _diff(old: str, new: str, old_name: str, new_name: str) -> str:
    return "".join(difflib.unified_diff(old.splitlines(True), new.splitlines(True), old_name, new_name))


def load_manifest(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read manifest {path}: {e}") from e


def replay(manifest_path: str, workers: Optional[int] = None) -> RunReport:
    """Reruns the recorded config; the report gains a `replay_identical` check.

    Refuses when the library versions differ from the recorded ones, or when the config file
    the run came from has been edited since.
    The chunk size comes from the recorded config text, never from SBMRE_CHUNK.
    """
    manifest = load_manifest(manifest_path)
    current = versions()
    if manifest.get("versions") != current:
        recorded = json.dumps(manifest.get("versions"), indent=1, sort_keys=True) + "\n"
        raise ReplayError("version mismatch", _diff(recorded, json.dumps(current, indent=1, sort_keys=True) + "\n",
                                                     "recorded", "current"))
    config = parse_config(manifest["config"], use_env=False)
    if config.config_hash != manifest["config_hash"]:
        raise ReplayError("manifest config does not match its recorded hash")
    source = manifest.get("config_path")
    if source and os.path.exists(source):
        with open(source, encoding="utf-8") as handle:
            edited = parse_config(handle.read(), {"mc.seed": config.seed}, use_env=False, chunk=config.chunk)
        if edited.config_hash != config.config_hash:
            raise ReplayError(f"{source} changed since the recorded run",
                              _diff(config.text, edited.text, "recorded", source))
    report = run_experiment(config, workers or manifest.get("workers", 1))
    report.source = source or ""
    digest = hashlib.sha256(csv_bytes(report)).hexdigest()
    identical = digest == manifest["csv_sha256"]
    if not identical:
        logger.warning("replay of %s differs: %s vs recorded %s", config.name, digest, manifest["csv_sha256"])
    rows = report.checks.to_dict("records")
    rows.append({"name": "replay_identical", "estimate": float(identical), "se": float("nan"),
                 "tolerance": float("nan"), "passed": identical, "inconclusive": False})
    report.checks = pd.DataFrame(rows, columns=report.checks.columns)
    return report
