"""Typed records for stream tuples: attribute descriptors, schemas, instances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import ValidationError


class Role(str, enum.Enum):
    NUMERIC = "numeric-feature"
    NOMINAL = "nominal-feature"
    CLASS = "class-label"


@dataclass(frozen=True)
class AttributeDescriptor:
    name: str
    role: Role
    sensitive: bool = False
    # Declared token domain for nominal features; None means "any token".
    domain: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError("attribute name must be a non-empty string")
        object.__setattr__(self, "role", Role(self.role))
        if self.sensitive and self.role is not Role.NUMERIC:
            raise ValidationError(
                f"attribute {self.name!r}: only numeric features can be sensitive"
            )
        if self.domain is not None:
            object.__setattr__(self, "domain", tuple(self.domain))


@dataclass(frozen=True)
class Schema:
    """Ordered attribute list plus the permitted class labels.

    ``class_domain`` is ordered; metrics index classes by this order.
    """

    attributes: tuple[AttributeDescriptor, ...]
    class_domain: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)
    _numeric: tuple = field(init=False, repr=False, compare=False)
    _class: int = field(init=False, repr=False, compare=False)
    _numeric_names: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "class_domain", tuple(self.class_domain))
        names = [a.name for a in attrs]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate attribute names: {dupes}")
        n_class = sum(a.role is Role.CLASS for a in attrs)
        if n_class != 1:
            raise ValidationError(f"schema needs exactly one class attribute, got {n_class}")
        if not any(a.role is Role.NUMERIC for a in attrs):
            raise ValidationError("schema needs at least one numeric feature")
        if len(set(self.class_domain)) != len(self.class_domain):
            raise ValidationError("class domain contains duplicates")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        numeric = tuple(i for i, a in enumerate(attrs) if a.role is Role.NUMERIC)
        object.__setattr__(self, "_numeric", numeric)
        object.__setattr__(self, "_numeric_names", tuple(names[i] for i in numeric))
        object.__setattr__(
            self, "_class", next(i for i, a in enumerate(attrs) if a.role is Role.CLASS)
        )

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def class_index(self) -> int:
        return self._class

    @property
    def class_name(self) -> str:
        return self.attributes[self.class_index].name

    @property
    def numeric_indices(self) -> tuple[int, ...]:
        return self._numeric

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return self._numeric_names

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown attribute {name!r}") from None

    def __getitem__(self, name: str) -> AttributeDescriptor:
        return self.attributes[self.index_of(name)]

    def with_sensitive(self, names: Iterable[str]) -> Schema:
        """Copy of the schema with exactly ``names`` flagged sensitive."""
        wanted = set(names)
        for n in wanted:
            if self[n].role is not Role.NUMERIC:
                raise ValidationError(f"sensitive attribute {n!r} is not a numeric feature")
        attrs = tuple(replace(a, sensitive=a.name in wanted) for a in self.attributes)
        return Schema(attrs, self.class_domain)

    def validate(self, inst: Instance) -> None:
        """Raise ValidationError naming the sequence id if ``inst`` does not fit."""
        sid = inst.sequence_id
        if len(inst.values) != len(self.attributes):
            raise ValidationError(
                f"instance {sid}: expected {len(self.attributes)} values, got {len(inst.values)}"
            )
        for attr, v in zip(self.attributes, inst.values):
            if attr.role is Role.NUMERIC:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValidationError(f"instance {sid}: {attr.name} is not a real number: {v!r}")
                if not math.isfinite(v):
                    raise ValidationError(f"instance {sid}: {attr.name} is not finite: {v!r}")
            elif attr.role is Role.CLASS:
                if v not in self.class_domain:
                    raise ValidationError(f"instance {sid}: class {v!r} not in class domain")
            else:
                if not isinstance(v, str):
                    raise ValidationError(f"instance {sid}: {attr.name} must be a token, got {v!r}")
                if attr.domain is not None and v not in attr.domain:
                    raise ValidationError(f"instance {sid}: {attr.name}={v!r} outside its domain")


@dataclass(frozen=True, slots=True)
class Instance:
    values: tuple
    sequence_id: int

    def __post_init__(self):
        if self.sequence_id < 0:
            raise ValidationError(f"negative sequence id {self.sequence_id}")

    def label(self, schema: Schema) -> str:
        return self.values[schema.class_index]


def make_schema(
    numeric: Sequence[str],
    class_domain: Sequence[str],
    class_name: str = "class",
    sensitive: Iterable[str] = (),
) -> Schema:
    """Convenience constructor: numeric features followed by the class label."""
    sens = set(sensitive)
    attrs = [AttributeDescriptor(n, Role.NUMERIC, n in sens) for n in numeric]
    attrs.append(AttributeDescriptor(class_name, Role.CLASS))
    return Schema(tuple(attrs), tuple(class_domain))
