"""Latent factor models, rating reconstruction, and model persistence."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import DegenerateModelError, ParseError
from .validation import check_index

_FORMAT_HEADER = "zeromat-factors v1"

# Rows of U multiplied against all of V at once when scanning for the max
# dot; bounds the dense block to a few MB regardless of model size.
_SCAN_CHUNK = 512


@dataclass(frozen=True)
class FactorModel:
    """User factors (num_users x k) and item factors (num_items x k).

    Immutable after construction; a pairwise score is the dot product of a
    user row with an item row.
    """

    user_factors: np.ndarray
    item_factors: np.ndarray

    def __post_init__(self):
        user_factors = _frozen_matrix(self.user_factors, "user_factors")
        item_factors = _frozen_matrix(self.item_factors, "item_factors")
        if user_factors.shape[1] != item_factors.shape[1]:
            raise ValueError(
                "user_factors and item_factors must share the latent dimension, got "
                f"{user_factors.shape[1]} and {item_factors.shape[1]}"
            )
        if user_factors.shape[1] < 1:
            raise ValueError("latent dimension must be >= 1")
        object.__setattr__(self, "user_factors", user_factors)
        object.__setattr__(self, "item_factors", item_factors)

    @property
    def num_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def num_items(self) -> int:
        return self.item_factors.shape[0]

    @property
    def k(self) -> int:
        return self.user_factors.shape[1]

    def dot_products(self, users, items) -> np.ndarray:
        """Pairwise scores for parallel arrays of user and item indices."""
        return np.einsum(
            "ij,ij->i", self.user_factors[users], self.item_factors[items]
        )


def _frozen_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got {arr.ndim}-D")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} entries must be finite")
    arr.flags.writeable = False
    return arr


def predict_rating(
    model: FactorModel, user: int, item: int, r_max: float, max_dot: float
) -> float:
    """Reconstruct a rating as ``r_max`` times the pair's share of ``max_dot``."""
    user = check_index(user, model.num_users, "user index")
    item = check_index(item, model.num_items, "item index")
    if not max_dot > 0:
        raise DegenerateModelError(f"max_dot must be > 0, got {max_dot}")
    dot = float(model.user_factors[user] @ model.item_factors[item])
    return r_max * dot / max_dot


def global_max_dot(model: FactorModel) -> float:
    """Exact maximum pairwise score over all user/item combinations."""
    if model.num_users == 0 or model.num_items == 0:
        raise DegenerateModelError("model has no user or item rows")
    best = -math.inf
    item_t = model.item_factors.T
    for lo in range(0, model.num_users, _SCAN_CHUNK):
        block = model.user_factors[lo : lo + _SCAN_CHUNK] @ item_t
        best = max(best, float(block.max()))
    return best


class LoadedFactors(NamedTuple):
    """A model read back from disk plus the metadata stored with it."""

    model: FactorModel
    epsilon: float
    seed: int


def save_factors(model: FactorModel, path, *, epsilon: float = 0.0, seed: int = 0) -> Path:
    """Write a model as versioned flat text.

    Layout: a format header, then ``num_users num_items k epsilon seed``,
    then the user rows and item rows with full-precision decimal entries.
    """
    lines = [
        _FORMAT_HEADER,
        f"{model.num_users} {model.num_items} {model.k} {float(epsilon)!r} {seed}",
    ]
    for matrix in (model.user_factors, model.item_factors):
        for row in matrix:
            lines.append(" ".join(repr(float(x)) for x in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_factors(path) -> LoadedFactors:
    """Read a model written by :func:`save_factors`, validating shape and
    the positivity floor recorded in its header."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != _FORMAT_HEADER:
        raise ParseError(f"expected header {_FORMAT_HEADER!r}", line_number=1)
    if len(lines) < 2:
        raise ParseError("missing dimension line", line_number=2)
    fields = lines[1].split()
    if len(fields) != 5:
        raise ParseError("dimension line must hold: num_users num_items k epsilon seed", 2)
    try:
        num_users, num_items, k = (int(f) for f in fields[:3])
        epsilon = float(fields[3])
        seed = int(fields[4])
    except ValueError:
        raise ParseError(f"malformed dimension line {lines[1]!r}", 2) from None
    expected = 2 + num_users + num_items
    if len(lines) != expected:
        raise ParseError(f"expected {expected} lines, found {len(lines)}", len(lines))
    rows = np.empty((num_users + num_items, k))
    for offset, line in enumerate(lines[2:]):
        values = line.split()
        if len(values) != k:
            raise ParseError(f"expected {k} entries per row, got {len(values)}", offset + 3)
        try:
            rows[offset] = [float(v) for v in values]
        except ValueError:
            raise ParseError(f"non-numeric factor entry in {line!r}", offset + 3) from None
    if not np.isfinite(rows).all():
        raise ParseError("factor entries must be finite", None)
    if epsilon > 0 and rows.size and rows.min() < epsilon:
        raise ParseError(
            f"factor entries fall below the recorded positivity floor {epsilon!r}", None
        )
    model = FactorModel(rows[:num_users], rows[num_users:])
    return LoadedFactors(model=model, epsilon=epsilon, seed=seed)
