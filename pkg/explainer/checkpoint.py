import json
import logging
from pathlib import Path

import numpy as np
import torch

from errors import ModelError
from explainer.network import ExplainerParams, init_explainer
from grouping import GroupPartition
from model import pack_arrays, unpack_arrays

logger = logging.getLogger(__name__)


def _paths(path) -> tuple[Path, Path]:
    path = Path(path)
    return path.with_suffix(".bin"), path.with_suffix(".json")


def save_explainer(params: ExplainerParams, path) -> tuple[Path, Path]:
    """Writes <path>.bin (network weights) and <path>.json (variant, sizes, seeds, partition)."""
    blob_path, sidecar_path = _paths(path)
    blob_path.parent.mkdir(parents=True, exist_ok=True)
    state = params.state_arrays()
    blob_path.write_bytes(pack_arrays({"kind": "explainer", "names": list(state)}, list(state.values())))

    sidecar = {
        "n": params.n,
        "d": params.d,
        "m": params.m,
        "hidden_units": params.hidden_units,
        "init_seed": params.init_seed,
        "head": params.head,
        "partition": params.partition.to_json() if params.partition is not None else None,
        "metadata": params.metadata,
        "losses": params.losses.tolist(),
    }
    sidecar_path.write_text(json.dumps(sidecar, indent=2, default=str))
    logger.info("saved explainer checkpoint to %s", blob_path)
    return blob_path, sidecar_path


def load_explainer(path) -> ExplainerParams:
    blob_path, sidecar_path = _paths(path)
    if not blob_path.exists() or not sidecar_path.exists():
        raise ModelError(f"missing checkpoint files for {path}")
    sidecar = json.loads(sidecar_path.read_text())
    header, arrays = unpack_arrays(blob_path.read_bytes())
    if header.get("kind") != "explainer":
        raise ModelError(f"{blob_path} is not an explainer checkpoint")

    partition = GroupPartition.from_json(sidecar["partition"]) if sidecar["partition"] else None
    params = init_explainer(
        sidecar["n"], sidecar["d"], sidecar["m"], sidecar["hidden_units"], sidecar["init_seed"],
        head=sidecar["head"], partition=partition,
    )
    expected = params.net.state_dict()
    if list(expected) != header["names"]:
        raise ModelError("checkpoint layers do not match the explainer layout")
    params.net.load_state_dict({name: torch.from_numpy(array) for name, array in zip(header["names"], arrays)})
    params.metadata = sidecar["metadata"]
    params.losses = np.asarray(sidecar["losses"], dtype=np.float64)
    return params
