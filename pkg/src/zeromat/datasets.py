"""Rating datasets: parsing, train/test splitting, and synthetic Zipf generation."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .exceptions import ParseError
from .validation import require_positive, require_unit_interval

MOVIELENS_SEPARATOR = "::"
CSV_HEADER = "user,item,rating"

# Users processed per block when sampling items; fixed so that a given
# (spec, seed) always consumes the random stream identically.
_SAMPLING_BLOCK = 4096


@dataclass(frozen=True)
class RatingTriple:
    """One observed rating: dense 0-based user/item indices and the value."""

    user: int
    item: int
    rating: float


@dataclass(frozen=True)
class RatingsDataset:
    """Immutable sparse rating matrix in coordinate form.

    ``users``, ``items`` and ``ratings`` are parallel arrays; each position is
    one (user, item, rating) observation. Indices are dense and 0-based; raw
    external ids, when the data came from a file, are kept in ``user_labels``
    and ``item_labels`` in index order.
    """

    num_users: int
    num_items: int
    r_max: float
    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_labels: tuple | None = None
    item_labels: tuple | None = None

    def __post_init__(self):
        for name in ("num_users", "num_items"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        require_positive(self.r_max, "r_max")
        users = _frozen_array(self.users, np.int64)
        items = _frozen_array(self.items, np.int64)
        ratings = _frozen_array(self.ratings, np.float64)
        if not users.ndim == items.ndim == ratings.ndim == 1:
            raise ValueError("users, items and ratings must be 1-D arrays")
        if not users.size == items.size == ratings.size:
            raise ValueError("users, items and ratings must have equal length")
        if users.size:
            if users.min() < 0 or users.max() >= self.num_users:
                raise ValueError(f"user index out of range [0, {self.num_users})")
            if items.min() < 0 or items.max() >= self.num_items:
                raise ValueError(f"item index out of range [0, {self.num_items})")
            if not np.isfinite(ratings).all():
                raise ValueError("ratings must be finite")
            if ratings.min() < 0 or ratings.max() > self.r_max:
                raise ValueError(f"ratings must lie in [0, {self.r_max}]")
            keys = users * self.num_items + items
            unique, counts = np.unique(keys, return_counts=True)
            if unique.size != keys.size:
                dup = unique[np.argmax(counts > 1)]
                raise ValueError(
                    "duplicate rating for user "
                    f"{dup // self.num_items}, item {dup % self.num_items}"
                )
        for label_name, expected in (
            ("user_labels", self.num_users),
            ("item_labels", self.num_items),
        ):
            labels = getattr(self, label_name)
            if labels is not None and len(labels) != expected:
                raise ValueError(f"{label_name} must have length {expected}")
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "ratings", ratings)

    def __len__(self) -> int:
        return self.users.size

    def triples(self) -> Iterator[RatingTriple]:
        """Iterate the observations as :class:`RatingTriple` records."""
        for u, i, r in zip(self.users, self.items, self.ratings):
            yield RatingTriple(int(u), int(i), float(r))

    def pairs(self) -> np.ndarray:
        """All observed (user, item) pairs as an (n, 2) array."""
        return np.column_stack([self.users, self.items])

    def drop_ratings(self) -> "RatingsDataset":
        """Same dimensions and r_max, but no observations at all."""
        empty = np.empty(0)
        return dataclasses.replace(self, users=empty, items=empty, ratings=empty)

    @classmethod
    def from_triples(
        cls,
        num_users: int,
        num_items: int,
        r_max: float,
        triples: Iterable[tuple[int, int, float]],
    ) -> "RatingsDataset":
        rows = [(t.user, t.item, t.rating) if isinstance(t, RatingTriple) else t for t in triples]
        if rows:
            users, items, ratings = (np.asarray(col) for col in zip(*rows))
        else:
            users = items = ratings = np.empty(0)
        return cls(num_users, num_items, r_max, users, items, ratings)


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_movielens(source, r_max: float | None = None) -> RatingsDataset:
    """Parse MovieLens-format lines: ``UserID::MovieID::Rating::Timestamp``.

    ``source`` may be a path, an open file, or an iterable of lines. Raw ids
    are remapped to dense 0-based indices in order of first appearance;
    timestamps are discarded. ``r_max`` defaults to the maximum observed
    rating.
    """
    return _parse_lines(source, _movielens_row, r_max)


def parse_ratings_csv(source, r_max: float | None = None) -> RatingsDataset:
    """Parse a generic ratings CSV with header ``user,item,rating``."""
    return _parse_lines(source, _csv_row, r_max, header=CSV_HEADER)


def load_ratings(path, r_max: float | None = None) -> RatingsDataset:
    """Load a ratings file, sniffing MovieLens vs CSV from its first line."""
    with open(path, "r", encoding="utf-8") as handle:
        first = handle.readline()
        if MOVIELENS_SEPARATOR in first:
            handle.seek(0)
            return parse_movielens(handle, r_max)
        if first.strip() == CSV_HEADER:
            handle.seek(0)
            return parse_ratings_csv(handle, r_max)
    raise ParseError(f"unrecognized ratings format in {path}", line_number=1)


def _movielens_row(line: str, line_number: int) -> tuple[str, str, float]:
    parts = line.split(MOVIELENS_SEPARATOR)
    if len(parts) != 4:
        raise ParseError(
            f"expected 4 '::'-separated fields, got {len(parts)}", line_number
        )
    return parts[0], parts[1], _parse_rating(parts[2], line_number)


def _csv_row(line: str, line_number: int) -> tuple[str, str, float]:
    parts = line.split(",")
    if len(parts) != 3:
        raise ParseError(f"expected 3 comma-separated fields, got {len(parts)}", line_number)
    return parts[0], parts[1], _parse_rating(parts[2], line_number)


def _parse_rating(text: str, line_number: int) -> float:
    try:
        rating = float(text)
    except ValueError:
        raise ParseError(f"non-numeric rating {text!r}", line_number) from None
    if not math.isfinite(rating) or rating < 0:
        raise ParseError(f"rating {rating!r} must be finite and >= 0", line_number)
    return rating


def _parse_lines(source, row_parser, r_max, header: str | None = None) -> RatingsDataset:
    users: list[int] = []
    items: list[int] = []
    ratings: list[float] = []
    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    with _as_lines(source) as lines:
        for line_number, raw in enumerate(lines, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            line = raw.rstrip("\r\n")
            if header is not None and line_number == 1:
                if line.strip() != header:
                    raise ParseError(f"expected header {header!r}", line_number)
                continue
            user_raw, item_raw, rating = row_parser(line, line_number)
            u = user_index.setdefault(user_raw, len(user_index))
            i = item_index.setdefault(item_raw, len(item_index))
            if (u, i) in seen:
                raise ParseError(
                    f"duplicate rating for user {user_raw!r}, item {item_raw!r}",
                    line_number,
                )
            seen.add((u, i))
            users.append(u)
            items.append(i)
            ratings.append(rating)
    if not users:
        raise ValueError("empty input: no rating lines found")
    rating_arr = np.asarray(ratings)
    if r_max is None:
        r_max = float(rating_arr.max())
    return RatingsDataset(
        num_users=len(user_index),
        num_items=len(item_index),
        r_max=r_max,
        users=np.asarray(users),
        items=np.asarray(items),
        ratings=rating_arr,
        user_labels=tuple(user_index),
        item_labels=tuple(item_index),
    )


class _as_lines:
    """Context manager yielding lines from a path, file object, or iterable."""

    def __init__(self, source):
        self._source = source
        self._handle = None

    def __enter__(self):
        if isinstance(self._source, (str, Path)):
            self._handle = open(self._source, "r", encoding="utf-8")
            return self._handle
        return self._source

    def __exit__(self, *exc):
        if self._handle is not None:
            self._handle.close()
        return False


def render_ratings_csv(dataset: RatingsDataset) -> str:
    """Serialize a dataset in the ``user,item,rating`` CSV format."""
    user_labels = dataset.user_labels or range(dataset.num_users)
    item_labels = dataset.item_labels or range(dataset.num_items)
    lines = [CSV_HEADER]
    for u, i, r in zip(dataset.users, dataset.items, dataset.ratings):
        lines.append(f"{user_labels[u]},{item_labels[i]},{float(r)!r}")
    return "\n".join(lines) + "\n"


def save_ratings_csv(dataset: RatingsDataset, path) -> Path:
    path = Path(path)
    path.write_text(render_ratings_csv(dataset), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Seeded uniform train/test split parameters."""

    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


def train_test_split(
    dataset: RatingsDataset, spec: SplitSpec
) -> tuple[RatingsDataset, RatingsDataset]:
    """Partition the observations by a seeded shuffle.

    The first ``ceil(train_fraction * n)`` shuffled observations form the
    train set; both halves keep the parent's dimensions and r_max.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    perm = np.random.default_rng(spec.seed).permutation(n)
    cut = int(math.ceil(spec.train_fraction * n))
    return _take(dataset, perm[:cut]), _take(dataset, perm[cut:])


def _take(dataset: RatingsDataset, idx: np.ndarray) -> RatingsDataset:
    return dataclasses.replace(
        dataset,
        users=dataset.users[idx],
        items=dataset.items[idx],
        ratings=dataset.ratings[idx],
    )


# ---------------------------------------------------------------------------
# Synthetic Zipf data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZipfSpec:
    """Synthetic dataset recipe: Zipf item popularity, optionally mixed
    toward uniform by ``uniform_mix`` (0 = pure Zipf, 1 = pure uniform)."""

    num_users: int
    num_items: int
    ratings_per_user: int
    exponent: float = 1.0
    r_max: float = 5.0
    uniform_mix: float = 0.0

    def __post_init__(self):
        for name in ("num_users", "num_items", "ratings_per_user"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        require_positive(self.exponent, "exponent")
        require_positive(self.r_max, "r_max")
        require_unit_interval(self.uniform_mix, "uniform_mix")


def item_weights(spec: ZipfSpec) -> np.ndarray:
    """Per-item sampling weights: ``(1 - mix) * zipf + mix * uniform``."""
    ranks = np.arange(1, spec.num_items + 1, dtype=np.float64)
    zipf = ranks ** -spec.exponent
    zipf /= zipf.sum()
    return (1.0 - spec.uniform_mix) * zipf + spec.uniform_mix / spec.num_items


def perturb_distribution(spec: ZipfSpec, uniform_mix: float) -> ZipfSpec:
    """Return the spec with its popularity distribution mixed toward uniform."""
    require_unit_interval(uniform_mix, "uniform_mix")
    return dataclasses.replace(spec, uniform_mix=uniform_mix)


def generate_zipf_dataset(spec: ZipfSpec, seed: int) -> RatingsDataset:
    """Draw a synthetic dataset whose item popularity follows the spec.

    Each user rates ``ratings_per_user`` distinct items drawn with
    probability proportional to the item weights. An item's rating level is
    tied to its popularity: rating = r_max * (weight / max weight) plus
    uniform noise in [-0.5, 0.5], clamped to [0.5, r_max], so at
    ``uniform_mix=0`` the per-item rating mass is Zipf-skewed.
    """
    if spec.ratings_per_user > spec.num_items:
        raise ValueError(
            f"ratings_per_user ({spec.ratings_per_user}) exceeds "
            f"num_items ({spec.num_items})"
        )
    rng = np.random.default_rng(seed)
    weights = item_weights(spec)
    quality = weights / weights.max()
    per_user = spec.ratings_per_user
    users = np.repeat(np.arange(spec.num_users, dtype=np.int64), per_user)
    items = np.empty(spec.num_users * per_user, dtype=np.int64)
    for lo in range(0, spec.num_users, _SAMPLING_BLOCK):
        hi = min(lo + _SAMPLING_BLOCK, spec.num_users)
        # Exponential race: the per-row smallest exp(1)/w keys are a weighted
        # sample without replacement.
        keys = rng.exponential(size=(hi - lo, spec.num_items)) / weights
        chosen = np.argpartition(keys, per_user - 1, axis=1)[:, :per_user]
        chosen.sort(axis=1)
        items[lo * per_user : hi * per_user] = chosen.ravel()
    noise = rng.uniform(-0.5, 0.5, size=users.size)
    ratings = np.clip(spec.r_max * quality[items] + noise, 0.5, spec.r_max)
    return RatingsDataset(
        num_users=spec.num_users,
        num_items=spec.num_items,
        r_max=spec.r_max,
        users=users,
        items=items,
        ratings=ratings,
    )
