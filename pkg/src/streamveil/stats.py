"""Online per-attribute statistics and z-score normalization.

``RunningStats`` keeps (n, mean, ssd) where ssd is the sum of squared
deviations from the running mean, updated with Welford's recurrence and
merged with Chan's pairwise formula. Values are immutable; every update
returns a new object.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ValidationError
from .schema import Instance, Schema


@dataclass(frozen=True, slots=True)
class RunningStats:
    n: int = 0
    mean: float = 0.0
    ssd: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"negative count {self.n}")
        if self.ssd < 0:
            # Chan's merge can round a true zero to a tiny negative.
            if self.ssd > -1e-12 * max(1.0, self.mean * self.mean) * max(self.n, 1):
                object.__setattr__(self, "ssd", 0.0)
            else:
                raise ValidationError(f"negative sum of squared deviations {self.ssd}")

    @property
    def variance(self) -> float:
        """Sample variance, ``ssd / (n - 1)``; 0 below two observations."""
        if self.n < 2:
            return 0.0
        return self.ssd / (self.n - 1)

    @property
    def stddev(self) -> float:
        return math.sqrt(self.variance)

    @classmethod
    def from_values(cls, values) -> RunningStats:
        """Batch construction from an array of observations (two-pass, numpy)."""
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            return cls()
        if not np.all(np.isfinite(x)):
            raise ValidationError("non-finite value in batch")
        mean = float(x.mean())
        ssd = float(np.square(x - mean).sum())
        return cls(int(x.size), mean, ssd)


EMPTY = RunningStats()


def stats_update(stats: RunningStats, x: float) -> RunningStats:
    if not math.isfinite(x):
        raise ValidationError(f"cannot update statistics with non-finite value {x!r}")
    n = stats.n + 1
    delta = x - stats.mean
    mean = stats.mean + delta / n
    ssd = stats.ssd + delta * (x - mean)
    return RunningStats(n, mean, ssd)


def stats_merge(a: RunningStats, b: RunningStats) -> RunningStats:
    if a.n == 0:
        return b
    if b.n == 0:
        return a
    n = a.n + b.n
    delta = b.mean - a.mean
    # Weighted form is symmetric in (a, b), so merge(a, b) == merge(b, a) bitwise.
    mean = (a.n * a.mean + b.n * b.mean) / n
    ssd = a.ssd + b.ssd + delta * delta * (a.n * b.n / n)
    return RunningStats(n, mean, ssd)


def fold(values: Iterable[float], stats: RunningStats = EMPTY) -> RunningStats:
    for x in values:
        stats = stats_update(stats, x)
    return stats


def zscore(x: float, stats: RunningStats) -> float:
    """``(x - mean) / stddev``, or 0.0 when the attribute shows no spread yet."""
    if stats.n == 0:
        raise ValidationError("z-score requested before any observation was seen")
    sd = stats.stddev
    if sd == 0.0:
        return 0.0
    return (x - stats.mean) / sd


class StatsTable(Mapping):
    """Frozen map from numeric-feature name to its ``RunningStats``."""

    __slots__ = ("_stats", "_moments")

    def __init__(self, stats: Mapping[str, RunningStats]):
        self._stats = dict(stats)
        self._moments = None

    def moments(self) -> dict[str, tuple[int, float, float]]:
        """Cached ``name -> (n, mean, stddev)``; safe because the table is frozen."""
        if self._moments is None:
            self._moments = {k: (s.n, s.mean, s.stddev) for k, s in self._stats.items()}
        return self._moments

    @classmethod
    def empty(cls, schema: Schema) -> StatsTable:
        return cls({name: EMPTY for name in schema.numeric_names})

    @classmethod
    def from_instances(cls, stream: Iterable[Instance], schema: Schema) -> StatsTable:
        """Batch statistics over a whole stream (the two-pass table)."""
        idx = schema.numeric_indices
        rows = [[inst.values[i] for i in idx] for inst in stream]
        if not rows:
            return cls.empty(schema)
        cols = np.asarray(rows, dtype=float)
        return cls(
            {name: RunningStats.from_values(cols[:, j]) for j, name in enumerate(schema.numeric_names)}
        )

    def update(self, inst: Instance, schema: Schema) -> StatsTable:
        """New table with every numeric value of ``inst`` folded in."""
        new = dict(self._stats)
        values = inst.values
        for i, name in zip(schema.numeric_indices, schema.numeric_names):
            new[name] = stats_update(new[name], values[i])
        return StatsTable(new)

    def merge(self, other: StatsTable) -> StatsTable:
        if self.keys() != other.keys():
            raise ValidationError("cannot merge tables over different attributes")
        return StatsTable({k: stats_merge(v, other[k]) for k, v in self._stats.items()})

    def check(self, schema: Schema) -> None:
        expected = set(schema.numeric_names)
        got = set(self._stats)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValidationError(f"stats table mismatch: missing={missing} extra={extra}")

    def __getitem__(self, name: str) -> RunningStats:
        return self._stats[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._stats)

    def __len__(self) -> int:
        return len(self._stats)

    def __repr__(self) -> str:
        return f"StatsTable({self._stats!r})"
