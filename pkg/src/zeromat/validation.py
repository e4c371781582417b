"""Input validation helpers shared by the estimators and the functional API."""
from __future__ import annotations

import numpy as np


def check_dimensions(shape) -> tuple[int, int]:
    """Validate an ``(n_users, n_items)`` pair of positive integers."""
    try:
        n_users, n_items = shape
    except (TypeError, ValueError):
        raise TypeError(
            "expected an (n_users, n_items) pair of positive integers, "
            f"got {shape!r}"
        ) from None
    for name, value in (("n_users", n_users), ("n_items", n_items)):
        if not _is_integral(value):
            raise TypeError(f"{name} must be an integer, got {value!r}")
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    return int(n_users), int(n_items)


def check_pairs(pairs, n_users: int, n_items: int) -> tuple[np.ndarray, np.ndarray]:
    """Validate an array-like of (user, item) index pairs against model dimensions.

    Returns the user and item index columns as int64 arrays.
    """
    arr = np.asarray(pairs)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected pairs of shape (n, 2), got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise TypeError(f"pair indices must be integers, got dtype {arr.dtype}")
    users = arr[:, 0].astype(np.int64)
    items = arr[:, 1].astype(np.int64)
    if users.size:
        if users.min() < 0 or users.max() >= n_users:
            raise IndexError(f"user index out of range [0, {n_users})")
        if items.min() < 0 or items.max() >= n_items:
            raise IndexError(f"item index out of range [0, {n_items})")
    return users, items


def check_index(value, size: int, name: str) -> int:
    """Validate a single 0-based index against ``size``."""
    if not _is_integral(value):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value < size:
        raise IndexError(f"{name} {value} out of range [0, {size})")
    return int(value)


def require_positive(value, name: str) -> None:
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


def require_unit_interval(value, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _is_integral(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)
