import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from helper import file_digest

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def _default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_default) + "\n"


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload))
    logger.info("wrote %s", path)
    return path


def write_blob(path, blob: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)
    logger.info("wrote %s", path)
    return path


def write_frame(path, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
    logger.info("wrote %s", path)
    return path


def write_manifest(out_dir, resolved_config: dict, artifacts: list, extra: dict = None) -> Path:
    """Resolved config plus the sha256 of every artifact written by the run."""
    out_dir = Path(out_dir)
    hashes = {Path(p).name: file_digest(p) for p in sorted(artifacts, key=lambda p: Path(p).name)}
    return write_json(out_dir / MANIFEST, {"config": resolved_config, "artifacts": hashes, **(extra or {})})


def read_manifest(run_dir) -> dict:
    return json.loads((Path(run_dir) / MANIFEST).read_text())
