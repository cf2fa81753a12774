import logging
import math
import re
from pathlib import Path

import numpy as np
import pandas as pd

from dataset.types import Dataset
from errors import DatasetError, DatasetParseError, IdxConsistencyError, IdxFormatError, LabelError

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
PIXEL_SCALE = 255.0


def load_csv(path, label_column: int, header: bool = False) -> Dataset:
    """Reads a comma-separated file; every column but `label_column` is a feature."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: no such file")
    try:
        frame = pd.read_csv(path, header=0 if header else None, dtype=str, skip_blank_lines=True)
    except UnicodeDecodeError as e:
        raise DatasetError(f"{path}: not UTF-8 text (byte {e.start})") from None
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path}: no data rows") from None
    except pd.errors.ParserError as e:
        raise DatasetParseError(_parser_error_row(str(e), header), f"malformed row ({e})") from None

    if frame.empty:
        raise DatasetError(f"{path}: no data rows")
    columns = frame.shape[1]
    if columns < 2:
        raise DatasetError(f"{path}: need at least one feature and one label column")
    if not -columns <= label_column < columns:
        raise DatasetError(f"label column {label_column} out of range for {columns} columns")
    label_column %= columns

    values = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    missing = frame.isna().any(axis=1).to_numpy()
    if missing.any():
        raise DatasetParseError(int(np.argmax(missing)), "missing field")

    labels = values.iloc[:, label_column].to_numpy()
    bad_label = np.isnan(labels) | (labels != np.floor(labels))
    if bad_label.any():
        row = int(np.argmax(bad_label))
        raise LabelError(f"row {row}: label {frame.iloc[row, label_column]!r} is not an integer")
    if labels.min() < 0:
        raise LabelError(f"row {int(np.argmin(labels))}: negative label")

    features = values.drop(columns=values.columns[label_column]).to_numpy(dtype=np.float64)
    unparsable = np.isnan(features).any(axis=1)
    if unparsable.any():
        raise DatasetParseError(int(np.argmax(unparsable)), "non-numeric feature")

    labels = labels.astype(np.int64)
    logger.info("loaded %d rows from %s", len(labels), path)
    return Dataset(features, labels, int(labels.max()) + 1)


def _parser_error_row(message: str, header: bool) -> int:
    # pandas reports 1-based file lines: "Expected 3 fields in line 5, saw 4"
    match = re.search(r"line (\d+)", message)
    return int(match.group(1)) - 1 - int(header) if match else -1


def _read_idx(path: Path, magic: int) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise IdxFormatError(f"{path}: unexpected end of file")
    found = int.from_bytes(raw[:4], "big")
    if found != magic:
        raise IdxFormatError(f"{path}: magic 0x{found:08x}, expected 0x{magic:08x}")
    ndim = raw[3]
    header_size = 4 + 4 * ndim
    if len(raw) < header_size:
        raise IdxFormatError(f"{path}: unexpected end of file")
    dims = np.frombuffer(raw, dtype=">u4", count=ndim, offset=4).astype(np.int64)
    count = int(np.prod(dims))
    if len(raw) < header_size + count:
        raise IdxFormatError(f"{path}: unexpected end of file")
    return np.frombuffer(raw, dtype=np.uint8, count=count, offset=header_size).reshape(dims)


def load_idx(images_path, labels_path) -> Dataset:
    """MNIST-layout IDX pair; pixels are scaled into [0, 1]."""
    images = _read_idx(images_path, IDX_IMAGES_MAGIC)
    labels = _read_idx(labels_path, IDX_LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise IdxConsistencyError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    if images.shape[0] == 0:
        raise DatasetError(f"{images_path}: no data rows")
    features = images.reshape(images.shape[0], -1).astype(np.float64) / PIXEL_SCALE
    labels = labels.astype(np.int64)
    logger.info("loaded %d IDX images of dimension %d", features.shape[0], features.shape[1])
    return Dataset(features, labels, int(labels.max()) + 1)


def write_idx(data: Dataset, images_path, labels_path, image_shape: tuple[int, int] = None):
    """Writes features (quantized to 8 bits) and labels as an IDX pair."""
    if image_shape is None:
        side = math.isqrt(data.d)
        image_shape = (side, side) if side * side == data.d else (1, data.d)
    if image_shape[0] * image_shape[1] != data.d:
        raise DatasetError(f"image shape {image_shape} does not hold {data.d} features")
    if data.m > 256:
        raise DatasetError("IDX labels are single bytes")

    pixels = np.clip(np.rint(data.features * PIXEL_SCALE), 0, 255).astype(np.uint8)
    header = np.array([IDX_IMAGES_MAGIC, data.n, *image_shape], dtype=">u4")
    Path(images_path).write_bytes(header.tobytes() + pixels.tobytes())
    header = np.array([IDX_LABELS_MAGIC, data.n], dtype=">u4")
    Path(labels_path).write_bytes(header.tobytes() + data.labels.astype(np.uint8).tobytes())
