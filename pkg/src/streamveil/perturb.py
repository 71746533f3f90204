"""Tuple-value multiplicative perturbation of sensitive numeric attributes.

Each instance gets a tuple value: the average of its z-score normalized
numeric features (class and nominal attributes excluded). Every sensitive
attribute of that instance is then multiplied by the tuple value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError
from .schema import Instance, Schema
from .stats import StatsTable


class StatsMode(str, enum.Enum):
    TWO_PASS = "two-pass"
    INCREMENTAL = "incremental"


@dataclass(frozen=True)
class PerturbationConfig:
    sensitive: frozenset[str]
    stats_mode: StatsMode = StatsMode.TWO_PASS
    pre_normalized: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "sensitive", frozenset(self.sensitive))
        object.__setattr__(self, "pre_normalized", frozenset(self.pre_normalized))
        object.__setattr__(self, "stats_mode", StatsMode(self.stats_mode))
        if not self.sensitive:
            raise ValidationError("at least one sensitive attribute is required")

    def check(self, schema: Schema) -> None:
        numeric = set(schema.numeric_names)
        bad = sorted(a for a in self.sensitive if a not in numeric)
        if bad:
            raise ValidationError(f"sensitive attributes are not numeric features: {bad}")
        bad = sorted(a for a in self.pre_normalized if a not in numeric)
        if bad:
            raise ValidationError(f"pre-normalized attributes are not numeric features: {bad}")


@dataclass(frozen=True)
class TupleValueRecord:
    sequence_id: int
    tuple_value: float
    original: dict[str, float] = field(default_factory=dict)
    perturbed: dict[str, float] = field(default_factory=dict)


def tuple_value(
    inst: Instance,
    schema: Schema,
    stats: StatsTable,
    pre_normalized: Iterable[str] = frozenset(),
) -> float:
    pre = pre_normalized if isinstance(pre_normalized, (set, frozenset)) else set(pre_normalized)
    moments = stats.moments()
    values = inst.values
    total = 0.0
    count = 0
    for i, name in zip(schema.numeric_indices, schema.numeric_names):
        x = values[i]
        if name in pre:
            total += x
        else:
            try:
                n, mean, sd = moments[name]
            except KeyError:
                raise ValidationError(f"no statistics for attribute {name!r}") from None
            if n == 0:
                raise ValidationError(f"z-score of {name!r} requested before any observation")
            # Same arithmetic as stats.zscore, inlined for the per-tuple hot path.
            total += 0.0 if sd == 0.0 else (x - mean) / sd
        count += 1
    if count == 0:
        raise ValidationError("schema has no numeric attributes contributing to the tuple value")
    return total / count


def perturb_instance(
    inst: Instance, schema: Schema, stats: StatsTable, cfg: PerturbationConfig
) -> tuple[Instance, TupleValueRecord]:
    tv = tuple_value(inst, schema, stats, cfg.pre_normalized)
    values = list(inst.values)
    original = {}
    perturbed = {}
    for name in sorted(cfg.sensitive):
        i = schema.index_of(name)
        original[name] = values[i]
        values[i] = perturbed[name] = tv * values[i]
    record = TupleValueRecord(inst.sequence_id, tv, original, perturbed)
    return Instance(tuple(values), inst.sequence_id), record


def iter_perturbed(
    stream: Iterable[Instance],
    schema: Schema,
    cfg: PerturbationConfig,
    stats: StatsTable | None = None,
    validate: bool = True,
) -> Iterator[tuple[Instance, TupleValueRecord]]:
    """Lazily perturb ``stream``.

    Two-pass mode needs the frozen table up front: pass ``stats`` or give a
    re-iterable sequence so it can be computed here. Incremental mode folds
    each instance's original values into the table before perturbing it,
    starting from ``stats`` if given. ``validate=False`` skips per-instance
    schema checks for streams the caller has already validated.
    """
    cfg.check(schema)
    if cfg.stats_mode is StatsMode.TWO_PASS:
        if stats is None:
            if not isinstance(stream, Sequence):
                raise ValidationError("two-pass mode needs a sequence or a precomputed table")
            if validate:
                for inst in stream:
                    schema.validate(inst)
            stats = StatsTable.from_instances(stream, schema)
            validate = False
        stats.check(schema)
        for inst in stream:
            if validate:
                schema.validate(inst)
            yield perturb_instance(inst, schema, stats, cfg)
    else:
        table = StatsTable.empty(schema) if stats is None else stats
        table.check(schema)
        for inst in stream:
            if validate:
                schema.validate(inst)
            table = table.update(inst, schema)
            yield perturb_instance(inst, schema, table, cfg)


def perturb_stream(
    stream: Sequence[Instance], schema: Schema, cfg: PerturbationConfig
) -> tuple[list[Instance], list[TupleValueRecord]]:
    if len(stream) == 0:
        raise ValidationError("cannot perturb an empty stream")
    out, records = [], []
    for inst, rec in iter_perturbed(stream, schema, cfg):
        out.append(inst)
        records.append(rec)
    return out, records
