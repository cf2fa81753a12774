import logging
from pathlib import Path

import pandas as pd

import messages as bm
from config import EXIT_OK
from errors import ComparabilityError
from services.artifacts import MANIFEST, read_manifest, write_frame

logger = logging.getLogger(__name__)

COMPARISON = "comparison.csv"


def completed_runs(config_dir) -> list[Path]:
    config_dir = Path(config_dir)
    if not config_dir.is_dir():
        raise ComparabilityError(f"{config_dir} is not a directory")
    return sorted(p for p in config_dir.iterdir() if (p / MANIFEST).is_file() and (p / "removal_curve.csv").is_file())


def _check_comparable(runs: pd.DataFrame):
    if len(runs) < 2:
        raise ComparabilityError(f"need at least two completed runs, found {len(runs)}")
    # every seed must name the same dataset in every method
    per_seed = runs.groupby("seed")["dataset"].nunique()
    mismatched = per_seed[per_seed > 1]
    if not mismatched.empty:
        raise ComparabilityError(f"runs with seed(s) {mismatched.index.tolist()} used different datasets")
    seed_sets = runs.groupby("method")["seed"].apply(lambda seeds: tuple(sorted(set(seeds))))
    if seed_sets.nunique() > 1:
        raise ComparabilityError(f"methods were run on different seeds: {seed_sets.to_dict()}")


TIMING_ORDER = ("exact", "fds", "afds", "gfds", "gfds+")
TIMING_SLACK = 0.2


def training_seconds(run_dir: Path, method: str) -> float:
    timing = pd.read_csv(run_dir / "timing.csv")
    phase = "valuation" if method == "exact" else "explainer-training"
    return float(timing.loc[timing["phase"] == phase, "seconds"].sum())


def timing_order_violations(seconds: dict, slack: float = TIMING_SLACK) -> list[tuple]:
    """Adjacent pairs in exact >= fds >= afds >= gfds >= gfds+ where the cheaper method ran over (1 + slack) x."""
    present = [method for method in TIMING_ORDER if method in seconds]
    violations = []
    for slower, faster in zip(present, present[1:]):
        if seconds[faster] > (1 + slack) * seconds[slower]:
            logger.warning(bm.timing_order_violation(slower, faster, seconds[slower], seconds[faster]))
            violations.append((slower, faster))
    return violations


def compare_runs(config_dir) -> Path:
    """H_eta per method and eta, mean and sample std over seeds, written to <dir>/comparison.csv."""
    rows, curves, timings = [], [], {}
    for run_dir in completed_runs(config_dir):
        manifest = read_manifest(run_dir)
        rows.append({"run": run_dir.name, "method": manifest["method"], "seed": manifest["seed"],
                     "dataset": manifest["datasetFingerprint"]})
        curve = pd.read_csv(run_dir / "removal_curve.csv")
        curve["seed"] = manifest["seed"]
        curves.append(curve)
        timings.setdefault(manifest["method"], []).append(training_seconds(run_dir, manifest["method"]))

    runs = pd.DataFrame(rows, columns=["run", "method", "seed", "dataset"])
    _check_comparable(runs)
    etas = {tuple(curve["eta"]) for curve in curves}
    if len(etas) > 1:
        raise ComparabilityError("runs used different removal fractions")

    table = (
        pd.concat(curves, ignore_index=True)
        .groupby(["method", "eta"])["h_value"]
        .agg(h_mean="mean", h_std="std", runs="count")
        .reset_index()
    )
    table["h_std"] = table["h_std"].fillna(0.0)
    timing_order_violations({method: sum(s) / len(s) for method, s in timings.items()})
    path = write_frame(Path(config_dir) / COMPARISON, table)
    print(bm.compare_finished(path, len(runs)))
    return path


def register(subparsers):
    parser = subparsers.add_parser("compare", help="tabulate removal curves of completed runs")
    parser.add_argument("config_dir", help="directory holding one subdirectory per run")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    compare_runs(args.config_dir)
    return EXIT_OK
