from .loaders import load_csv, load_idx, write_idx
from .synthetic import blob_centers, generate
from .types import Dataset, SyntheticSpec

__all__ = [
    'Dataset',
    'SyntheticSpec',
    'blob_centers',
    'generate',
    'load_csv',
    'load_idx',
    'write_idx',
]
