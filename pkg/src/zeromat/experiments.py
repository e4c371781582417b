"""Experiment harness: three-way method comparisons and the lock-state sweep."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .baselines import PMF, PmfConfig, random_predictor
from .datasets import (
    RatingsDataset,
    SplitSpec,
    ZipfSpec,
    generate_zipf_dataset,
    load_ratings,
    perturb_distribution,
    train_test_split,
)
from .metrics import MATTHEW_METRIC_LABEL, EvalReport, fit_zipf_exponent, mae, matthew_degree
from .training import TrainConfig, ZeroMat

REPORT_CSV_HEADER = "method,mae,matthew_degree,zipf_slope,seed,k,eta,iterations"
CURVE_CSV_HEADER = "lambda,zeromat_mae,pmf_mae,random_mae,replicates"
REPORT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    """A full comparison run: one data source, a split, and both trainers.

    Exactly one of ``data_path`` (MovieLens or CSV ratings file) and ``zipf``
    (synthetic recipe) must be set. ``seed`` drives dataset generation and
    the random baseline; the split and the trainers carry their own seeds.
    ``out_path`` of None means the caller prints the rendered report instead
    of writing a file.
    """

    data_path: str | Path | None = None
    zipf: ZipfSpec | None = None
    split: SplitSpec = SplitSpec()
    zeromat: TrainConfig = TrainConfig()
    pmf: PmfConfig = PmfConfig()
    r_max_override: float | None = None
    seed: int = 0
    out_path: str | Path | None = None
    report_format: str = "csv"

    def __post_init__(self):
        if (self.data_path is None) == (self.zipf is None):
            raise ValueError("exactly one of data_path and zipf must be set")
        _check_format(self.report_format)


@dataclass(frozen=True)
class LockstateCurve:
    """Mean MAE per method across a sweep of uniform-mix values."""

    lambdas: tuple[float, ...]
    zeromat_mae: tuple[float, ...]
    pmf_mae: tuple[float, ...]
    random_mae: tuple[float, ...]
    replicates: int
    seeds: tuple[int, ...]

    def __post_init__(self):
        n = len(self.lambdas)
        if n == 0:
            raise ValueError("curve needs at least one lambda")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambdas):
            raise ValueError("lambdas must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ValueError("lambdas must be strictly ascending")
        if not len(self.zeromat_mae) == len(self.pmf_mae) == len(self.random_mae) == n:
            raise ValueError("one MAE triple is required per lambda")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


def derive_seeds(seed: int, n: int) -> tuple[int, ...]:
    """Derive ``n`` independent sub-seeds from one master seed."""
    state = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return tuple(int(s) for s in state)


def load_dataset(config: ExperimentConfig) -> RatingsDataset:
    """Resolve the config's data source to a dataset."""
    if config.zipf is not None:
        data_seed, _ = derive_seeds(config.seed, 2)
        return generate_zipf_dataset(config.zipf, data_seed)
    return load_ratings(config.data_path, r_max=config.r_max_override)


def run_comparison(config: ExperimentConfig) -> list[EvalReport]:
    """Load or generate data, split it, and score all methods on the test half."""
    dataset = load_dataset(config)
    train, test = train_test_split(dataset, config.split)
    _, baseline_seed = derive_seeds(config.seed, 2)
    return compare_on_split(
        train,
        test,
        zeromat=config.zeromat,
        pmf=config.pmf,
        baseline_seed=baseline_seed,
    )


def compare_on_split(
    train: RatingsDataset,
    test: RatingsDataset,
    *,
    zeromat: TrainConfig,
    pmf: PmfConfig,
    baseline_seed: int,
) -> list[EvalReport]:
    """Score the data-free trainer, PMF, and random guesses on one split.

    All methods are evaluated on the identical test pairs in identical
    order. The data-free trainer sees only the train half's dimensions and
    r_max, never its observations.
    """
    if len(test) == 0:
        raise ValueError("test split is empty: nothing to evaluate")
    pairs = test.pairs()
    truths = test.ratings

    zm = ZeroMat(
        r_max=train.r_max,
        k=zeromat.k,
        learning_rate=zeromat.learning_rate,
        iterations=zeromat.iterations,
        epsilon=zeromat.epsilon,
        prior_variance=zeromat.prior_variance,
        seed=zeromat.seed,
    ).fit((train.num_users, train.num_items))
    pm = PMF(
        k=pmf.k,
        learning_rate=pmf.learning_rate,
        reg=pmf.reg,
        epochs=pmf.epochs,
        seed=pmf.seed,
        r_max=train.r_max,
    ).fit(train)

    rows = [
        ("zeromat", zm.predict(pairs), zeromat.seed, {
            "k": zeromat.k,
            "learning_rate": zeromat.learning_rate,
            "iterations": zm.iterations_,
            "epsilon": zeromat.epsilon,
            "prior_variance": zeromat.prior_variance,
            "r_max": train.r_max,
        }),
        ("pmf", pm.predict(pairs), pmf.seed, {
            "k": pmf.k,
            "learning_rate": pmf.learning_rate,
            "reg": pmf.reg,
            "epochs": pmf.epochs,
            "r_max": train.r_max,
        }),
        ("random", random_predictor(pairs, train.r_max, baseline_seed), baseline_seed, {
            "r_max": train.r_max,
        }),
        ("ground_truth", truths, None, {}),
    ]
    reports = []
    for method, predictions, seed, echo in rows:
        mass = np.zeros(test.num_items)
        np.add.at(mass, test.items, predictions)
        positive = np.sort(mass[mass > 0])[::-1]
        reports.append(
            EvalReport(
                method=method,
                mae=mae(predictions, truths),
                matthew_degree=matthew_degree(mass),
                zipf_slope=fit_zipf_exponent(positive),
                seed=seed,
                config=echo,
            )
        )
    return reports


def run_lockstate_experiment(
    base_spec: ZipfSpec,
    lambdas,
    replicates: int,
    *,
    split: SplitSpec = SplitSpec(),
    zeromat: TrainConfig = TrainConfig(),
    pmf: PmfConfig = PmfConfig(),
    seed: int = 0,
) -> LockstateCurve:
    """Sweep the uniform-mix knob and average each method's test MAE.

    Every lambda reuses the same replicate seeds, so points along the curve
    are paired. Per replicate, the split, both trainers, and the comparison
    seed are derived from that replicate's seed.
    """
    lambdas = tuple(float(lam) for lam in lambdas)
    if not lambdas:
        raise ValueError("need at least one lambda")
    if any(not 0.0 <= lam <= 1.0 for lam in lambdas):
        raise ValueError("uniform_mix values must lie in [0, 1]")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be strictly ascending")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    rep_seeds = derive_seeds(seed, replicates)
    means: dict[str, list[float]] = {"zeromat": [], "pmf": [], "random": []}
    for lam in lambdas:
        spec = perturb_distribution(base_spec, lam)
        sums = {name: 0.0 for name in means}
        for rep_seed in rep_seeds:
            s_split, s_zm, s_pmf, s_cfg = derive_seeds(rep_seed, 4)
            reports = run_comparison(
                ExperimentConfig(
                    zipf=spec,
                    split=replace(split, seed=s_split),
                    zeromat=replace(zeromat, seed=s_zm),
                    pmf=replace(pmf, seed=s_pmf),
                    seed=s_cfg,
                )
            )
            for report in reports:
                if report.method in sums:
                    sums[report.method] += report.mae
        for name in means:
            means[name].append(sums[name] / replicates)
    return LockstateCurve(
        lambdas=lambdas,
        zeromat_mae=tuple(means["zeromat"]),
        pmf_mae=tuple(means["pmf"]),
        random_mae=tuple(means["random"]),
        replicates=replicates,
        seeds=rep_seeds,
    )


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def render_report(reports: list[EvalReport], fmt: str) -> str:
    """Serialize comparison rows; numbers carry 6 decimal places."""
    _check_format(fmt)
    if fmt == "json":
        payload = [
            {
                "method": r.method,
                "mae": round(r.mae, 6),
                "matthew_degree": round(r.matthew_degree, 6),
                "zipf_slope": round(r.zipf_slope, 6),
                "seed": r.seed,
                "config": {k: _round6(v) for k, v in r.config.items()},
                "matthew_metric": MATTHEW_METRIC_LABEL,
            }
            for r in reports
        ]
        return json.dumps(payload, indent=2) + "\n"
    lines = [REPORT_CSV_HEADER]
    for r in reports:
        k = r.config.get("k", "")
        eta = r.config.get("learning_rate", "")
        eta_text = "" if eta == "" else f"{eta:.6f}"
        iterations = r.config.get("iterations", r.config.get("epochs", ""))
        lines.append(
            f"{r.method},{r.mae:.6f},{r.matthew_degree:.6f},{r.zipf_slope:.6f},"
            f"{_blank(r.seed)},{_blank(k)},{eta_text},{_blank(iterations)}"
        )
    return "\n".join(lines) + "\n"


def render_curve(curve: LockstateCurve, fmt: str) -> str:
    """Serialize a lock-state curve; numbers carry 6 decimal places."""
    _check_format(fmt)
    if fmt == "json":
        payload = {
            "lambdas": [round(lam, 6) for lam in curve.lambdas],
            "zeromat_mae": [round(v, 6) for v in curve.zeromat_mae],
            "pmf_mae": [round(v, 6) for v in curve.pmf_mae],
            "random_mae": [round(v, 6) for v in curve.random_mae],
            "replicates": curve.replicates,
            "seeds": list(curve.seeds),
        }
        return json.dumps(payload, indent=2) + "\n"
    lines = [CURVE_CSV_HEADER]
    for lam, zm, pm, rnd in zip(
        curve.lambdas, curve.zeromat_mae, curve.pmf_mae, curve.random_mae
    ):
        lines.append(f"{lam:.6f},{zm:.6f},{pm:.6f},{rnd:.6f},{curve.replicates}")
    return "\n".join(lines) + "\n"


def emit_report(payload, fmt: str, path) -> Path:
    """Write comparison rows or a lock-state curve to ``path``."""
    if isinstance(payload, LockstateCurve):
        text = render_curve(payload, fmt)
    else:
        text = render_report(payload, fmt)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def _check_format(fmt: str) -> None:
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"format must be one of {REPORT_FORMATS}, got {fmt!r}")


def _round6(value):
    return round(value, 6) if isinstance(value, float) else value


def _blank(value) -> str:
    return "" if value is None or value == "" else str(value)
