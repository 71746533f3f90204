import pytest

from streamveil.schema import AttributeDescriptor, Instance, Role, Schema, make_schema


@pytest.fixture
def schema2():
    """Two numeric features and an Up/Down class."""
    return make_schema(["a", "b"], ["Up", "Down"])


@pytest.fixture
def mixed_schema():
    attrs = (
        AttributeDescriptor("a", Role.NUMERIC),
        AttributeDescriptor("colour", Role.NOMINAL, domain=("red", "blue")),
        AttributeDescriptor("b", Role.NUMERIC),
        AttributeDescriptor("c", Role.NUMERIC),
        AttributeDescriptor("class", Role.CLASS),
    )
    return Schema(attrs, ("Up", "Down"))


@pytest.fixture
def four_stream(mixed_schema):
    rows = [
        (1.0, "red", 10.0, -3.0, "Up"),
        (2.0, "blue", 14.0, -1.0, "Down"),
        (4.0, "red", 9.0, 0.5, "Up"),
        (7.0, "blue", 11.0, 2.5, "Down"),
    ]
    return [Instance(r, i) for i, r in enumerate(rows)]


# Acceptance verdicts, one line per criterion, printed after the run.
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
