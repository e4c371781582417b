"""History-based PMF baseline and the random-guess baseline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .datasets import RatingsDataset
from .exceptions import DivergenceError
from .factors import FactorModel
from .validation import check_index, check_pairs, require_positive


@dataclass(frozen=True)
class PmfConfig:
    """Hyperparameters for the squared-error matrix factorization baseline."""

    k: int = 10
    learning_rate: float = 0.005
    reg: float = 0.05
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        require_positive(self.learning_rate, "learning_rate")
        if self.reg < 0:
            raise ValueError(f"reg must be >= 0, got {self.reg}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class PmfRun:
    """A finished PMF run: config, model, and the objective value before
    training and after each epoch."""

    config: PmfConfig
    model: FactorModel
    epoch_losses: tuple[float, ...]


def pmf_loss(model: FactorModel, dataset: RatingsDataset, reg: float) -> float:
    """Regularized squared error over the observed ratings."""
    errors = dataset.ratings - model.dot_products(dataset.users, dataset.items)
    penalty = (model.user_factors**2).sum() + (model.item_factors**2).sum()
    return float((errors**2).sum() + reg * penalty)


def pmf_loss_grad(
    model: FactorModel, dataset: RatingsDataset, reg: float
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of :func:`pmf_loss` w.r.t. both factor matrices."""
    errors = dataset.ratings - model.dot_products(dataset.users, dataset.items)
    grad_users = 2.0 * reg * model.user_factors.copy()
    grad_items = 2.0 * reg * model.item_factors.copy()
    np.add.at(grad_users, dataset.users, -2.0 * errors[:, None] * model.item_factors[dataset.items])
    np.add.at(grad_items, dataset.items, -2.0 * errors[:, None] * model.user_factors[dataset.users])
    return grad_users, grad_items


def train_pmf(train: RatingsDataset, config: PmfConfig) -> PmfRun:
    """Fit factors to observed ratings by per-triple stochastic descent.

    Each epoch visits the training triples in a fresh seeded shuffle; within
    one update both rows read the pre-step values. Initialization is seeded
    uniform on [0, 1]. Raises :class:`DivergenceError` if any entry goes
    non-finite, reporting the epoch.
    """
    if len(train) == 0:
        raise ValueError("cannot train PMF on an empty dataset")
    rng = np.random.default_rng(config.seed)
    user_factors = rng.uniform(0.0, 1.0, size=(train.num_users, config.k))
    item_factors = rng.uniform(0.0, 1.0, size=(train.num_items, config.k))
    learning_rate = config.learning_rate
    reg = config.reg
    users = train.users.tolist()
    items = train.items.tolist()
    ratings = train.ratings.tolist()
    losses = [_loss_arrays(user_factors, item_factors, train, reg)]
    for epoch in range(config.epochs):
        for idx in rng.permutation(len(users)):
            uu = users[idx]
            ii = items[idx]
            u = user_factors[uu]
            v = item_factors[ii]
            error = ratings[idx] - float(u @ v)
            u_pre = u.copy()
            user_factors[uu] = u + learning_rate * (error * v - reg * u)
            item_factors[ii] = v + learning_rate * (error * u_pre - reg * v)
        if not (np.isfinite(user_factors).all() and np.isfinite(item_factors).all()):
            raise DivergenceError(
                f"non-finite factor entries after epoch {epoch}", epoch=epoch
            )
        losses.append(_loss_arrays(user_factors, item_factors, train, reg))
    return PmfRun(
        config=config,
        model=FactorModel(user_factors, item_factors),
        epoch_losses=tuple(losses),
    )


def _loss_arrays(user_factors, item_factors, dataset, reg):
    preds = np.einsum(
        "ij,ij->i", user_factors[dataset.users], item_factors[dataset.items]
    )
    penalty = (user_factors**2).sum() + (item_factors**2).sum()
    return float(((dataset.ratings - preds) ** 2).sum() + reg * penalty)


def predict_pmf(model: FactorModel, user: int, item: int, r_max: float) -> float:
    """Pairwise score clipped to the [0, r_max] rating scale."""
    user = check_index(user, model.num_users, "user index")
    item = check_index(item, model.num_items, "item index")
    dot = float(model.user_factors[user] @ model.item_factors[item])
    return min(max(dot, 0.0), r_max)


def random_predictor(pairs, r_max: float, seed: int) -> np.ndarray:
    """One i.i.d. uniform draw from [0, r_max] per pair, seeded."""
    require_positive(r_max, "r_max")
    return np.random.default_rng(seed).uniform(0.0, r_max, size=len(pairs))


class PMF(BaseEstimator):
    """Matrix factorization fit to observed ratings, for comparison against
    the data-free estimator.

    Parameters
    ----------
    k : int
        Latent dimension.
    learning_rate : float
        Per-triple step size.
    reg : float
        L2 regularization weight on both factor matrices.
    epochs : int
        Full passes over the training triples.
    seed : int
        Seed controlling init and shuffling.
    r_max : float or None
        Prediction clip ceiling; None takes the training dataset's r_max.
    """

    def __init__(
        self,
        k: int = 10,
        learning_rate: float = 0.005,
        reg: float = 0.05,
        epochs: int = 30,
        seed: int = 0,
        r_max: float | None = None,
    ):
        self.k = k
        self.learning_rate = learning_rate
        self.reg = reg
        self.epochs = epochs
        self.seed = seed
        self.r_max = r_max

    def fit(self, X, y=None):
        """Fit to a :class:`RatingsDataset` or an (n, 3) array of
        (user, item, rating) rows."""
        dataset = X if isinstance(X, RatingsDataset) else _coerce_ratings(X)
        config = PmfConfig(
            k=self.k,
            learning_rate=self.learning_rate,
            reg=self.reg,
            epochs=self.epochs,
            seed=self.seed,
        )
        run = train_pmf(dataset, config)
        self.run_ = run
        self.model_ = run.model
        self.epoch_losses_ = run.epoch_losses
        self.r_max_ = float(self.r_max) if self.r_max is not None else dataset.r_max
        return self

    def predict(self, pairs) -> np.ndarray:
        """Clipped pairwise scores for an (n, 2) array of (user, item) pairs."""
        check_is_fitted(self, "model_")
        users, items = check_pairs(pairs, self.model_.num_users, self.model_.num_items)
        return np.clip(self.model_.dot_products(users, items), 0.0, self.r_max_)


class RandomBaseline(BaseEstimator):
    """Uniform random guesses on [0, r_max]; deterministic per seed."""

    def __init__(self, r_max: float = 5.0, seed: int = 0):
        self.r_max = r_max
        self.seed = seed

    def fit(self, X=None, y=None):
        require_positive(self.r_max, "r_max")
        self.fitted_ = True
        return self

    def predict(self, pairs) -> np.ndarray:
        check_is_fitted(self, "fitted_")
        return random_predictor(pairs, self.r_max, self.seed)


def _coerce_ratings(X) -> RatingsDataset:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected rating rows of shape (n, 3), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("cannot train PMF on an empty dataset")
    users = arr[:, 0]
    items = arr[:, 1]
    if not (users == users.astype(np.int64)).all() or not (items == items.astype(np.int64)).all():
        raise ValueError("user and item columns must hold integer indices")
    return RatingsDataset(
        num_users=int(users.max()) + 1,
        num_items=int(items.max()) + 1,
        r_max=float(arr[:, 2].max()),
        users=users.astype(np.int64),
        items=items.astype(np.int64),
        ratings=arr[:, 2],
    )
