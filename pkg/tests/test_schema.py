import math

import pytest

from streamveil.errors import ValidationError
from streamveil.schema import AttributeDescriptor, Instance, Role, Schema, make_schema


def test_make_schema_layout(schema2):
    assert schema2.names == ["a", "b", "class"]
    assert schema2.numeric_indices == (0, 1)
    assert schema2.class_index == 2
    assert schema2.class_name == "class"


def test_sensitive_only_on_numeric():
    with pytest.raises(ValidationError):
        AttributeDescriptor("c", Role.CLASS, sensitive=True)
    with pytest.raises(ValidationError):
        AttributeDescriptor("n", Role.NOMINAL, sensitive=True)


@pytest.mark.parametrize(
    "attrs, domain",
    [
        # no class
        ((AttributeDescriptor("a", Role.NUMERIC),), ()),
        # two classes
        (
            (
                AttributeDescriptor("a", Role.NUMERIC),
                AttributeDescriptor("c1", Role.CLASS),
                AttributeDescriptor("c2", Role.CLASS),
            ),
            ("x",),
        ),
        # no numeric feature
        ((AttributeDescriptor("n", Role.NOMINAL), AttributeDescriptor("c", Role.CLASS)), ("x",)),
        # duplicate names
        (
            (
                AttributeDescriptor("a", Role.NUMERIC),
                AttributeDescriptor("a", Role.NUMERIC),
                AttributeDescriptor("c", Role.CLASS),
            ),
            ("x",),
        ),
    ],
)
def test_schema_invariants(attrs, domain):
    with pytest.raises(ValidationError):
        Schema(attrs, domain)


def test_empty_name_rejected():
    with pytest.raises(ValidationError):
        AttributeDescriptor("", Role.NUMERIC)


def test_with_sensitive(mixed_schema):
    s = mixed_schema.with_sensitive(["b"])
    assert [a.name for a in s.attributes if a.sensitive] == ["b"]
    with pytest.raises(ValidationError):
        mixed_schema.with_sensitive(["colour"])
    with pytest.raises(ValidationError):
        mixed_schema.with_sensitive(["nope"])


@pytest.mark.parametrize(
    "values",
    [
        (1.0, 2.0),
        (1.0, math.nan, "Up"),
        (1.0, math.inf, "Up"),
        ("1.0", 2.0, "Up"),
        (1.0, 2.0, "Sideways"),
    ],
)
def test_validate_rejects(schema2, values):
    with pytest.raises(ValidationError, match="instance 7"):
        schema2.validate(Instance(values, 7))


def test_validate_nominal_domain(mixed_schema):
    mixed_schema.validate(Instance((1.0, "red", 2.0, 3.0, "Up"), 0))
    with pytest.raises(ValidationError):
        mixed_schema.validate(Instance((1.0, "green", 2.0, 3.0, "Up"), 0))


def test_negative_sequence_id():
    with pytest.raises(ValidationError):
        Instance((1.0, "Up"), -1)


def test_label(schema2):
    assert Instance((1.0, 2.0, "Down"), 0).label(schema2) == "Down"
