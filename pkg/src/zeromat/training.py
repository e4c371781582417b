"""Data-free factor training driven only by matrix dimensions and r_max.

The trainer maximizes a log-likelihood made of per-pair log scores plus
Gaussian priors on the factor rows, by sampling random (user, item) index
pairs and applying a multiplicative update to each sampled row pair. No
rating observations enter anywhere: the training signature accepts only the
matrix dimensions and the hyperparameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .datasets import RatingsDataset
from .exceptions import DegeneratePairError
from .factors import FactorModel, global_max_dot
from .validation import check_dimensions, check_pairs, require_positive

MAX_DEFAULT_ITERATIONS = 5_000_000


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the data-free trainer.

    ``iterations=None`` resolves to :func:`default_iterations` for the
    dimensions being trained. ``epsilon`` is the positivity floor applied to
    every factor entry, keeping all pairwise scores strictly positive.
    ``prior_variance`` is the shared variance of the Gaussian priors; at the
    default 0.5 the prior gradient is exactly the ``-2 * row`` term used by
    the update rule.
    """

    k: int = 10
    learning_rate: float = 0.001
    iterations: int | None = None
    seed: int = 0
    epsilon: float = 1e-6
    prior_variance: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        require_positive(self.learning_rate, "learning_rate")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        require_positive(self.epsilon, "epsilon")
        require_positive(self.prior_variance, "prior_variance")
        if self.epsilon >= 1.0 / math.sqrt(self.k):
            raise ValueError("epsilon must be below the init range 1/sqrt(k)")


@dataclass(frozen=True)
class ZeroMatRun:
    """A finished training run: resolved config, model, and the likelihood
    values sampled along the way as (iteration, value) pairs."""

    config: TrainConfig
    model: FactorModel
    likelihood_trace: tuple[tuple[int, float], ...]


def default_iterations(n_users: int, n_items: int) -> int:
    """Default update count: 20 per user row (scaled up when items dominate),
    capped at :data:`MAX_DEFAULT_ITERATIONS`."""
    return min(20 * n_users * math.ceil(n_items / n_users), MAX_DEFAULT_ITERATIONS)


def init_factors(n_users: int, n_items: int, config: TrainConfig) -> FactorModel:
    """Seeded i.i.d. uniform init on [epsilon, 1/sqrt(k)].

    The 1/sqrt(k) scale keeps initial pairwise scores near 0.25, below the
    update rule's fixed point at 0.5, so training ascends the likelihood.
    All entries are positive, hence every pairwise score is positive.
    """
    n_users, n_items = check_dimensions((n_users, n_items))
    rng = np.random.default_rng(config.seed)
    user_factors, item_factors = _draw_factors(n_users, n_items, config, rng)
    return FactorModel(user_factors, item_factors)


def _draw_factors(n_users, n_items, config, rng):
    high = 1.0 / math.sqrt(config.k)
    user_factors = rng.uniform(config.epsilon, high, size=(n_users, config.k))
    item_factors = rng.uniform(config.epsilon, high, size=(n_items, config.k))
    return user_factors, item_factors


def log_likelihood(model: FactorModel, prior_variance: float) -> float:
    """Sum of log pairwise scores minus the Gaussian prior penalties."""
    require_positive(prior_variance, "prior_variance")
    dots = model.user_factors @ model.item_factors.T
    if dots.size and dots.min() <= 0:
        user, item = np.unravel_index(int(dots.argmin()), dots.shape)
        raise ValueError(
            f"non-positive score {dots[user, item]} for user {user}, item {item}: "
            "log-likelihood undefined"
        )
    return _log_likelihood_arrays(
        model.user_factors, model.item_factors, prior_variance, dots
    )


def _log_likelihood_arrays(user_factors, item_factors, prior_variance, dots=None):
    if dots is None:
        dots = user_factors @ item_factors.T
    penalty = ((user_factors * user_factors).sum() + (item_factors * item_factors).sum())
    return float(np.log(dots).sum() - penalty / (2.0 * prior_variance))


def log_likelihood_grad(
    model: FactorModel, prior_variance: float
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of :func:`log_likelihood` w.r.t. both factor matrices."""
    require_positive(prior_variance, "prior_variance")
    dots = model.user_factors @ model.item_factors.T
    if dots.size and dots.min() <= 0:
        user, item = np.unravel_index(int(dots.argmin()), dots.shape)
        raise ValueError(
            f"non-positive score {dots[user, item]} for user {user}, item {item}: "
            "gradient undefined"
        )
    inverse = 1.0 / dots
    grad_users = inverse @ model.item_factors - model.user_factors / prior_variance
    grad_items = inverse.T @ model.user_factors - model.item_factors / prior_variance
    return grad_users, grad_items


def sgd_step(
    model: FactorModel, user: int, item: int, learning_rate: float, epsilon: float
) -> tuple[np.ndarray, np.ndarray]:
    """One stochastic update for a sampled (user, item) pair.

    Both new rows are computed from the pre-step values:

        u' = u + lr * (v / (u.v) - 2u)
        v' = v + lr * (u / (u.v) - 2v)

    then floored entrywise at ``epsilon``. Returns the updated rows without
    mutating the model. Raises :class:`DegeneratePairError` when the pre-step
    score is below ``epsilon``.
    """
    if not 0 <= user < model.num_users:
        raise IndexError(f"user index {user} out of range [0, {model.num_users})")
    if not 0 <= item < model.num_items:
        raise IndexError(f"item index {item} out of range [0, {model.num_items})")
    u = model.user_factors[user]
    v = model.item_factors[item]
    dot = float(u @ v)
    if dot < epsilon:
        raise DegeneratePairError(
            f"score {dot} for user {user}, item {item} is below the floor {epsilon}"
        )
    return _updated_rows(u, v, dot, learning_rate, epsilon)


def _updated_rows(u, v, dot, learning_rate, epsilon):
    new_u = u + learning_rate * (v / dot - 2.0 * u)
    new_v = v + learning_rate * (u / dot - 2.0 * v)
    return np.maximum(new_u, epsilon), np.maximum(new_v, epsilon)


def train_zeromat(n_users: int, n_items: int, config: TrainConfig) -> ZeroMatRun:
    """Train factors from dimensions alone.

    Initializes seeded positive factors, then for the configured number of
    iterations samples a uniform (user, item) index pair and applies
    :func:`sgd_step` semantics in place. Pairs whose score has fallen below
    the floor are skipped; the next iteration samples afresh. The likelihood
    is recorded every ``max(1, iterations // 100)`` steps.
    """
    n_users, n_items = check_dimensions((n_users, n_items))
    if config.iterations is None:
        config = replace(config, iterations=default_iterations(n_users, n_items))
    rng = np.random.default_rng(config.seed)
    user_factors, item_factors = _draw_factors(n_users, n_items, config, rng)
    total = config.iterations
    learning_rate = config.learning_rate
    epsilon = config.epsilon
    sampled_users = rng.integers(0, n_users, size=total)
    sampled_items = rng.integers(0, n_items, size=total)
    record_every = max(1, total // 100)
    trace = []
    for step in range(total):
        i = sampled_users[step]
        j = sampled_items[step]
        u = user_factors[i]
        v = item_factors[j]
        dot = float(u @ v)
        if dot >= epsilon:
            user_factors[i], item_factors[j] = _updated_rows(
                u, v, dot, learning_rate, epsilon
            )
        if (step + 1) % record_every == 0:
            trace.append(
                (
                    step + 1,
                    _log_likelihood_arrays(
                        user_factors, item_factors, config.prior_variance
                    ),
                )
            )
    return ZeroMatRun(
        config=config,
        model=FactorModel(user_factors, item_factors),
        likelihood_trace=tuple(trace),
    )


class ZeroMat(BaseEstimator):
    """Cold-start rating estimator trained without any rating data.

    ``fit`` accepts only the matrix dimensions; the only rating-scale
    information the model ever sees is ``r_max``. Predictions rescale each
    pairwise factor score by ``r_max / max_score`` so the best pair scores
    exactly ``r_max`` and every prediction is positive.

    Parameters
    ----------
    r_max : float
        Top of the rating scale, as defined by the product.
    k : int
        Latent dimension of the factor vectors.
    learning_rate : float
        Step size of the stochastic updates.
    iterations : int or None
        Update count; None picks a dimension-scaled default.
    epsilon : float
        Positivity floor applied to every factor entry.
    prior_variance : float
        Variance of the Gaussian priors on factor rows.
    seed : int
        Seed controlling init and pair sampling; runs are bit-reproducible.
    """

    def __init__(
        self,
        r_max: float = 5.0,
        k: int = 10,
        learning_rate: float = 0.001,
        iterations: int | None = None,
        epsilon: float = 1e-6,
        prior_variance: float = 0.5,
        seed: int = 0,
    ):
        self.r_max = r_max
        self.k = k
        self.learning_rate = learning_rate
        self.iterations = iterations
        self.epsilon = epsilon
        self.prior_variance = prior_variance
        self.seed = seed

    def fit(self, shape, y=None):
        """Fit from an ``(n_users, n_items)`` pair. Rating data is refused."""
        if isinstance(shape, RatingsDataset):
            raise TypeError(
                "ZeroMat trains from dimensions only; pass "
                "(dataset.num_users, dataset.num_items) instead of the dataset"
            )
        n_users, n_items = check_dimensions(shape)
        require_positive(self.r_max, "r_max")
        config = TrainConfig(
            k=self.k,
            learning_rate=self.learning_rate,
            iterations=self.iterations,
            seed=self.seed,
            epsilon=self.epsilon,
            prior_variance=self.prior_variance,
        )
        run = train_zeromat(n_users, n_items, config)
        self.run_ = run
        self.model_ = run.model
        self.iterations_ = run.config.iterations
        self.likelihood_trace_ = run.likelihood_trace
        self.max_dot_ = global_max_dot(run.model)
        return self

    def predict(self, pairs) -> np.ndarray:
        """Predicted ratings for an (n, 2) array of (user, item) pairs."""
        check_is_fitted(self, "model_")
        users, items = check_pairs(pairs, self.model_.num_users, self.model_.num_items)
        return self.r_max * self.model_.dot_products(users, items) / self.max_dot_
