import logging
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

import messages as bm
from config import EXIT_OK, THREADS
from dataset import Dataset, SyntheticSpec, generate, load_csv, load_idx
from evaluation import average_curves, random_ranking, removal_curve, retrain
from explainer import ExplainerTrainConfig, PartitionConfig, predict_normalized, save_explainer, train_explainer
from helper import derive_seed
from model import Architecture, TrainConfig, predict_proba, to_bytes
from services.artifacts import write_blob, write_frame, write_json, write_manifest
from services.cache import cache_wrap
from services.settings import ExperimentConfig, load_config, output_dir
from shapley import ShapleyVector, cwls_solve, exact_shapley, loo_values, permutation_shapley
from utility import ConvergedUtility

logger = logging.getLogger(__name__)

VARIANTS = {"fds": "FDS", "afds": "AFDS", "gfds": "GFDS", "gfds+": "GFDS+"}


class PhaseTimer:
    """Wall-clock seconds per named phase, in the order phases ran."""

    def __init__(self):
        self.rows = []

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.rows.append({"phase": name, "seconds": time.perf_counter() - start})
            logger.info("phase %s took %.3fs", name, self.rows[-1]["seconds"])

    def seconds(self, name: str) -> float:
        return sum(row["seconds"] for row in self.rows if row["phase"] == name)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["phase", "seconds"])


def load_dataset(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    """(training players, held-out test pool) for the configured source."""
    data_cfg = cfg.dataset
    if data_cfg.source == "synthetic":
        spec = SyntheticSpec(
            data_cfg.kind, data_cfg.n + data_cfg.test_size, data_cfg.d, data_cfg.m, data_cfg.noise_std,
            seed=derive_seed(cfg.seed, "dataset"),
        )
        full = generate(spec)
    elif data_cfg.source == "csv":
        full = load_csv(data_cfg.path, data_cfg.label_column, data_cfg.header)
    else:
        full = load_idx(data_cfg.images, data_cfg.labels)

    train, test = full.split(data_cfg.test_size, derive_seed(cfg.seed, "split"))
    if train.n > data_cfg.n:
        train = train.subset(np.arange(data_cfg.n))
    logger.info("dataset: %d training points, %d held out, d=%d, m=%d", train.n, test.n, train.d, train.m)
    return train, test


def architecture(cfg: ExperimentConfig, data: Dataset) -> Architecture:
    if cfg.model.kind == "mlp1":
        return Architecture.mlp1(data.d, data.m, cfg.model.hidden_units)
    return Architecture.logistic(data.d, data.m)


def train_config(cfg: ExperimentConfig, stream: str) -> TrainConfig:
    model = cfg.model
    return TrainConfig(
        learning_rate=model.learning_rate,
        epochs=model.epochs,
        batch_size=model.batch_size,
        seed=derive_seed(cfg.seed, stream),
        convergence_tol=model.convergence_tol,
    )


def explainer_config(cfg: ExperimentConfig, data: Dataset) -> ExplainerTrainConfig:
    val = cfg.valuation
    return ExplainerTrainConfig(
        variant=VARIANTS[val.method],
        learning_rate=val.alpha,
        steps=val.steps,
        batch_size=val.batch_size,
        K=val.K,
        beta=val.beta,
        N=val.N if val.N is not None else data.m,
        gamma=val.gamma,
        gfds_plus_head=val.head,
        hidden_units=val.hidden_units,
        seed=derive_seed(cfg.seed, "explainer"),
    )


def _oracle_values(cfg: ExperimentConfig, method: str, game, index: int) -> ShapleyVector:
    val = cfg.valuation
    if method == "exact":
        return exact_shapley(game)
    if method == "loo":
        return ShapleyVector.certify(loo_values(game), game.grand(), game.empty())
    if method == "tmc":
        return permutation_shapley(game, permutations=val.permutations, truncation_tol=val.truncation_tol,
                                   seed=derive_seed(cfg.seed, "tmc", index))
    if method == "cwls":
        return cwls_solve(game, mode=val.cwls_mode, num_samples=val.samples, seed=derive_seed(cfg.seed, "cwls", index))
    return ShapleyVector.certify(random_ranking(game.n, derive_seed(cfg.seed, "random", index)),
                                 game.grand(), game.empty())


def value_samples(cfg, train, samples, service_model, arch, threads, out_dir, timer):
    """One ShapleyVector per test sample, explained at the service model's predicted label."""
    method = cfg.valuation.method
    predicted = predict_proba(service_model, samples.features).argmax(axis=1)
    artifacts = []

    if method in VARIANTS:
        explainer_cfg = explainer_config(cfg, train)
        partition = PartitionConfig(explainer_cfg.N, seed=derive_seed(cfg.seed, "partition"))
        with timer.phase("explainer-training"):
            params, provider = train_explainer(
                train, explainer_cfg, service_model=service_model, service_cfg=train_config(cfg, "utility"),
                partition=partition, threads=threads, arch=arch,
            )
        artifacts += save_explainer(params, out_dir / "explainer")
        if params.partition is not None:
            artifacts.append(write_json(out_dir / "partition.json", params.partition.to_json()))
        with timer.phase("valuation"):
            vectors = []
            for x, y in zip(samples.features, predicted):
                y = int(y)
                vectors.append(predict_normalized(params, x, y, provider.v_one(x, y), provider.v_zero(x, y)))
        return vectors, predicted, artifacts

    provider = cache_wrap(ConvergedUtility(train, train_config(cfg, "utility"), arch, threads=threads))
    with timer.phase("valuation"):
        vectors = [_oracle_values(cfg, method, provider.bind(x, int(y)), i)
                   for i, (x, y) in enumerate(zip(samples.features, predicted))]
    logger.debug("utility cache: %s", provider.stats())
    return vectors, predicted, artifacts


def run_experiment(config_path, *, seed=None, out=None, threads=None, header=None) -> Path:
    cfg = load_config(config_path, seed=seed, out=out, header=header)
    threads = threads or THREADS
    out_dir = output_dir(cfg, config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    timer = PhaseTimer()

    with timer.phase("dataset"):
        train, test = load_dataset(cfg)
    arch = architecture(cfg, train)
    with timer.phase("service"):
        service_model = retrain(train, train_config(cfg, "service"), arch, derive_seed(cfg.seed, "service-init"))
    service_path = write_blob(out_dir / "service.bin", to_bytes(service_model))

    samples = test.subset(np.arange(min(cfg.evaluation.max_samples, test.n)))
    vectors, predicted, artifacts = value_samples(cfg, train, samples, service_model, arch, threads, out_dir, timer)
    artifacts.insert(0, service_path)

    records = [
        {"index": i, "x": samples.features[i], "label": int(samples.labels[i]), "predicted": int(predicted[i]),
         **vector.to_json()}
        for i, vector in enumerate(vectors)
    ]
    artifacts.append(write_json(out_dir / "shapley.json", {
        "method": cfg.valuation.method,
        "n": train.n,
        "samples": records,
    }))

    with timer.phase("removal"):
        curves = [
            removal_curve(train, vector.values, cfg.evaluation.etas, train_config(cfg, "removal"),
                          samples.subset([i]), arch=arch, seed=derive_seed(cfg.seed, "eval"),
                          method=cfg.valuation.method, threads=threads)
            for i, vector in enumerate(vectors)
        ]
    curve = average_curves(curves)
    artifacts.append(write_frame(out_dir / "removal_curve.csv", curve.to_frame()))
    artifacts.append(write_frame(out_dir / "timing.csv", timer.to_frame()))

    write_manifest(out_dir, cfg.flatten(), artifacts, {
        "configPath": str(config_path),
        "datasetFingerprint": train.fingerprint(),
        "testFingerprint": samples.fingerprint(),
        "method": cfg.valuation.method,
        "seed": cfg.seed,
    })
    print(bm.run_finished(out_dir, cfg.valuation.method, samples.n))
    return out_dir


def register(subparsers):
    parser = subparsers.add_parser("run", help="value training data for one experiment config")
    parser.add_argument("config", help="flat key = value experiment file")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    run_experiment(args.config, seed=args.seed, out=args.out, threads=args.threads, header=args.header)
    return EXIT_OK
