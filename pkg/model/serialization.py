import json
import struct

import numpy as np

from errors import ModelError
from model.classifier import Architecture, ModelParams

BLOB_MAGIC = b"FDSB"
BLOB_VERSION = 1


def pack_arrays(header: dict, arrays: list[np.ndarray]) -> bytes:
    """magic | version | header length | JSON header | row-major little-endian float64 payload."""
    header = dict(header, shapes=[list(a.shape) for a in arrays])
    encoded = json.dumps(header, sort_keys=True).encode()
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    return BLOB_MAGIC + struct.pack("<II", BLOB_VERSION, len(encoded)) + encoded + payload


def unpack_arrays(blob: bytes) -> tuple[dict, list[np.ndarray]]:
    if len(blob) < 12 or blob[:4] != BLOB_MAGIC:
        raise ModelError("not a parameter blob")
    version, header_len = struct.unpack_from("<II", blob, 4)
    if version != BLOB_VERSION:
        raise ModelError(f"unsupported blob version {version}")
    offset = 12 + header_len
    try:
        header = json.loads(blob[12:offset])
    except ValueError:
        raise ModelError("unreadable parameter blob header") from None
    if not isinstance(header, dict) or "shapes" not in header:
        raise ModelError("parameter blob header lists no array shapes")
    arrays = []
    for shape in header["shapes"]:
        count = int(np.prod(shape))
        if offset + 8 * count > len(blob):
            raise ModelError("unexpected end of parameter blob")
        arrays.append(np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(shape).copy())
        offset += 8 * count
    return header, arrays


def to_bytes(params: ModelParams) -> bytes:
    arch = params.arch
    header = {
        "kind": arch.kind,
        "input_dim": arch.input_dim,
        "output_dim": arch.output_dim,
        "hidden_units": arch.hidden_units,
        "init_seed": params.init_seed,
    }
    return pack_arrays(header, params.arrays())


def from_bytes(blob: bytes) -> ModelParams:
    header, arrays = unpack_arrays(blob)
    try:
        arch = Architecture(header["kind"], header["input_dim"], header["output_dim"], header["hidden_units"])
        init_seed = header["init_seed"]
    except KeyError as e:
        raise ModelError(f"blob header is missing {e.args[0]!r}; not a service model") from None
    return ModelParams(arch, arrays[0::2], arrays[1::2], init_seed=init_seed)


def to_json(params: ModelParams) -> dict:
    arch = params.arch
    return {
        "architecture": {
            "kind": arch.kind,
            "input_dim": arch.input_dim,
            "output_dim": arch.output_dim,
            "hidden_units": arch.hidden_units,
        },
        "init_seed": params.init_seed,
        "layers": [
            {"weights": w.tolist(), "bias": b.tolist()} for w, b in zip(params.weights, params.biases)
        ],
    }
