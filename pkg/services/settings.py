"""
Experiment configuration.

Experiment files are flat `key = value` text with dotted section keys:

    seed = 7
    dataset.source = synthetic
    dataset.kind = gaussian-blobs
    dataset.n = 8
    valuation.method = gfds
    valuation.N = 2
    evaluation.etas = 0, 0.1, 0.2

They are read with dotenv_values, which never consults or changes the
process environment, so a config file is the whole description of a run.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from dotenv import dotenv_values

import config
from errors import ConfigError

DATASET_SOURCES = ("synthetic", "csv", "idx")
MODEL_KINDS = ("logistic", "mlp1")
CWLS_MODES = ("enumerate", "sampled")
DEFAULT_ETAS = (0.0, 0.1, 0.2, 0.3)


@dataclass(frozen=True)
class DatasetSettings:
    source: str = "synthetic"
    kind: str = "gaussian-blobs"
    n: int = 8
    d: int = 2
    m: int = 2
    noise_std: float = 0.5
    test_size: int = 10
    path: str = None
    label_column: int = -1
    header: bool = False
    images: str = None
    labels: str = None


@dataclass(frozen=True)
class ModelSettings:
    kind: str = "logistic"
    hidden_units: int = 16
    learning_rate: float = config.SERVICE_LR
    epochs: int = config.SERVICE_EPOCHS
    batch_size: int = config.SERVICE_BATCH_SIZE
    convergence_tol: float = config.CONVERGENCE_TOL


@dataclass(frozen=True)
class ValuationSettings:
    method: str = "exact"
    K: int = config.K
    beta: float = config.BETA
    N: int = None
    gamma: float = 0.0
    alpha: float = config.EXPLAINER_LR
    steps: int = config.EXPLAINER_STEPS
    batch_size: int = config.EXPLAINER_BATCH_SIZE
    hidden_units: int = config.EXPLAINER_HIDDEN_UNITS
    head: str = "N-dim-split"
    permutations: int = 200
    truncation_tol: float = None
    cwls_mode: str = "enumerate"
    samples: int = 2000


@dataclass(frozen=True)
class EvaluationSettings:
    etas: tuple = DEFAULT_ETAS
    max_samples: int = 10


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    out: str = None
    dataset: DatasetSettings = field(default_factory=DatasetSettings)
    model: ModelSettings = field(default_factory=ModelSettings)
    valuation: ValuationSettings = field(default_factory=ValuationSettings)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)

    def flatten(self) -> dict:
        """Dotted-key view, the form manifests record."""
        flat = {"seed": self.seed, "out": self.out}
        for section in ("dataset", "model", "valuation", "evaluation"):
            for key, value in asdict(getattr(self, section)).items():
                flat[f"{section}.{key}"] = list(value) if isinstance(value, tuple) else value
        return flat


SECTIONS = {
    "dataset": DatasetSettings,
    "model": ModelSettings,
    "valuation": ValuationSettings,
    "evaluation": EvaluationSettings,
}


def _coerce(key: str, raw: str, kind):
    raw = raw.strip()
    try:
        if kind is bool:
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is tuple:
            return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(key, f"cannot read {raw!r} as {kind.__name__}") from None
    return raw


def _field_type(section_cls, name: str):
    for item in fields(section_cls):
        if item.name == name:
            default = item.default
            if isinstance(default, (bool, int, float, tuple)):
                return type(default)
            return {"N": int, "truncation_tol": float}.get(name, str)
    return None


def parse_config(values: dict) -> ExperimentConfig:
    """Builds a validated ExperimentConfig from dotted key/value strings."""
    sections = {name: {} for name in SECTIONS}
    top = {}
    for key, raw in values.items():
        if raw is None:
            raise ConfigError(key, "missing value")
        if "." not in key:
            if key not in ("seed", "out"):
                raise ConfigError(key, "unknown key")
            top[key] = raw.strip()
            continue
        section, name = key.split(".", 1)
        if section not in SECTIONS:
            raise ConfigError(key, "unknown section")
        kind = _field_type(SECTIONS[section], name)
        if kind is None:
            raise ConfigError(key, "unknown key")
        sections[section][name] = _coerce(key, raw, kind)

    if "seed" not in top:
        raise ConfigError("seed", "a root seed is required")
    seed = _coerce("seed", top["seed"], int)
    cfg = ExperimentConfig(
        seed=seed,
        out=top.get("out") or None,
        **{name: SECTIONS[name](**section) for name, section in sections.items()},
    )
    validate(cfg)
    return cfg


def load_config(path, *, seed: int = None, out: str = None, header: bool = None) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"{path} does not exist")
    cfg = parse_config(dotenv_values(path, interpolate=False))
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if out is not None:
        cfg = replace(cfg, out=out)
    if header is not None:
        cfg = replace(cfg, dataset=replace(cfg.dataset, header=header))
    return cfg


def output_dir(cfg: ExperimentConfig, config_path) -> Path:
    return Path(cfg.out) if cfg.out else Path(config.OUTPUT_DIR) / Path(config_path).stem


def group_count(cfg: ExperimentConfig) -> int:
    """valuation.N, defaulting to one group per label."""
    return cfg.valuation.N if cfg.valuation.N is not None else cfg.dataset.m


def validate(cfg: ExperimentConfig):
    data, model, val, ev = cfg.dataset, cfg.model, cfg.valuation, cfg.evaluation

    if data.source not in DATASET_SOURCES:
        raise ConfigError("dataset.source", f"expected one of {DATASET_SOURCES}")
    if data.source == "csv" and not data.path:
        raise ConfigError("dataset.path", "csv datasets need a path")
    if data.source == "idx" and not (data.images and data.labels):
        raise ConfigError("dataset.images", "idx datasets need images and labels paths")
    if data.n < 1:
        raise ConfigError("dataset.n", "must be at least 1")
    if data.m < 1:
        raise ConfigError("dataset.m", "must be at least 1")
    if data.test_size < 1:
        raise ConfigError("dataset.test_size", "must be at least 1")

    if model.kind not in MODEL_KINDS:
        raise ConfigError("model.kind", f"expected one of {MODEL_KINDS}")
    if model.learning_rate <= 0:
        raise ConfigError("model.learning_rate", "must be positive")
    if model.epochs < 1:
        raise ConfigError("model.epochs", "must be at least 1")

    if val.method not in config.VALUATION_METHODS:
        raise ConfigError("valuation.method", f"expected one of {config.VALUATION_METHODS}")
    if val.method in ("gfds", "gfds+"):
        N = group_count(cfg)
        if not 1 <= N <= data.n:
            raise ConfigError("valuation.N", f"N={N} must lie in [1, n={data.n}]")
    if val.K < 1:
        raise ConfigError("valuation.K", "must be at least 1")
    if val.beta <= 0:
        raise ConfigError("valuation.beta", "must be positive")
    if val.gamma < 0:
        raise ConfigError("valuation.gamma", "must be non-negative")
    if val.alpha <= 0:
        raise ConfigError("valuation.alpha", "must be positive")
    if val.steps < 0:
        raise ConfigError("valuation.steps", "must be non-negative")
    if val.head not in ("n-dim-penalty", "N-dim-split"):
        raise ConfigError("valuation.head", "expected n-dim-penalty or N-dim-split")
    if val.cwls_mode not in CWLS_MODES:
        raise ConfigError("valuation.cwls_mode", f"expected one of {CWLS_MODES}")
    if val.permutations < 1:
        raise ConfigError("valuation.permutations", "must be at least 1")

    etas = ev.etas
    if not etas or min(etas) < 0 or max(etas) >= 1:
        raise ConfigError("evaluation.etas", "every removal fraction must lie in [0, 1)")
    if any(b <= a for a, b in zip(etas, etas[1:])):
        raise ConfigError("evaluation.etas", "must be strictly increasing")
    if ev.max_samples < 1:
        raise ConfigError("evaluation.max_samples", "must be at least 1")
