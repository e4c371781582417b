"""Evaluation metrics: MAE, concentration of item rating mass, Zipf slope."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# How the Matthew-effect degree is computed; recorded in JSON reports since
# concentration can be measured many ways.
MATTHEW_METRIC_LABEL = "gini_of_item_rating_mass"


def mae(predictions, truths) -> float:
    """Mean absolute error between two equal-length value lists."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(truths, dtype=np.float64)
    if p.ndim != 1 or t.ndim != 1:
        raise ValueError("predictions and truths must be 1-D")
    if p.size != t.size:
        raise ValueError(f"length mismatch: {p.size} predictions vs {t.size} truths")
    if p.size == 0:
        raise ValueError("cannot compute MAE of empty inputs")
    return float(np.mean(np.abs(p - t)))


def matthew_degree(item_mass) -> float:
    """Gini coefficient of a per-item mass vector.

    0 means every item holds equal mass; (m - 1) / m means one item holds
    everything. Scale-free and permutation-invariant.
    """
    x = np.asarray(item_mass, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("item_mass must be a non-empty 1-D vector")
    if x.min() < 0:
        raise ValueError("item masses must be non-negative")
    total = x.sum()
    if total <= 0:
        raise ValueError("item masses are all zero: concentration undefined")
    m = x.size
    ranks = np.arange(1, m + 1)
    return float(((2 * ranks - m - 1) * np.sort(x)).sum() / (m * total))


def fit_zipf_exponent(frequencies, min_frequency: float | None = None) -> float:
    """Least-squares slope of log frequency against log rank.

    ``frequencies`` must be positive and sorted descending; ranks are
    1..n. An exact power law ``C / i**s`` yields ``-s``. ``min_frequency``
    optionally drops the tail below that value before fitting.
    """
    f = np.asarray(frequencies, dtype=np.float64)
    if f.ndim != 1:
        raise ValueError("frequencies must be 1-D")
    if f.size and f.min() <= 0:
        raise ValueError("frequencies must be strictly positive")
    if min_frequency is not None:
        f = f[f >= min_frequency]
    if f.size < 2:
        raise ValueError("need at least 2 positive frequencies to fit a slope")
    x = np.log(np.arange(1, f.size + 1, dtype=np.float64))
    y = np.log(f)
    x_centered = x - x.mean()
    return float((x_centered * (y - y.mean())).sum() / (x_centered**2).sum())


@dataclass(frozen=True)
class EvalReport:
    """One method's evaluation row plus the hyperparameters behind it."""

    method: str
    mae: float
    matthew_degree: float
    zipf_slope: float
    seed: int | None = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mae < 0:
            raise ValueError(f"mae must be >= 0, got {self.mae}")
        if not 0.0 <= self.matthew_degree <= 1.0:
            raise ValueError(
                f"matthew_degree must lie in [0, 1], got {self.matthew_degree}"
            )
