"""Dataset loading (dense ARFF subset, headed CSV) and synthetic streams.

Loaders come in two flavours: ``open_*`` returns ``(schema, iterator)`` and
parses lazily, ``load_*`` materializes the list. Missing values (``?``) are
rejected rather than imputed.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .schema import AttributeDescriptor, Instance, Role, Schema

FORMATS = ("arff", "csv")
_NUMERIC_TYPES = {"numeric", "real", "integer"}


@dataclass(frozen=True)
class DatasetSource:
    path: Path
    format: str | None = None
    declared_schema: Schema | None = None

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        fmt = self.format
        if fmt is None:
            fmt = self.path.suffix.lower().lstrip(".")
        if fmt not in FORMATS:
            raise ValidationError(f"unsupported dataset format {fmt!r} (expected arff or csv)")
        object.__setattr__(self, "format", fmt)


def _as_source(source, fmt) -> DatasetSource:
    if isinstance(source, DatasetSource):
        return source
    return DatasetSource(Path(source), fmt)


def _parse_real(token, line, path, name):
    if token == "?":
        raise ParseError(f"missing value for {name!r} is not supported", line, path)
    try:
        x = float(token)
    except ValueError:
        raise ParseError(f"{name!r}: cannot parse {token!r} as a real number", line, path) from None
    if not math.isfinite(x):
        raise ParseError(f"{name!r}: non-finite value {token!r}", line, path)
    return x


def _convert_row(tokens, schema, seq, line, path):
    if len(tokens) != len(schema.attributes):
        raise ParseError(
            f"expected {len(schema.attributes)} values, got {len(tokens)}", line, path
        )
    values = []
    for attr, tok in zip(schema.attributes, tokens):
        if attr.role is Role.NUMERIC:
            values.append(_parse_real(tok, line, path, attr.name))
            continue
        if tok == "?" or tok == "":
            raise ParseError(f"missing value for {attr.name!r} is not supported", line, path)
        domain = schema.class_domain if attr.role is Role.CLASS else attr.domain
        if domain is not None and tok not in domain:
            raise ParseError(f"{attr.name!r}: value {tok!r} not in {{{','.join(domain)}}}", line, path)
        values.append(tok)
    return Instance(tuple(values), seq)


# --------------------------------------------------------------------- ARFF


def _split_arff(text, line, path):
    """Split a comma-separated ARFF list honouring single and double quotes."""
    out = []
    buf = []
    quote = None
    pending = False
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\" and i + 1 < len(text):
                buf.append(text[i + 1])
                i += 2
                continue
            if ch == quote:
                quote = None
            else:
                buf.append(ch)
        elif ch in "'\"":
            quote = ch
        elif ch == ",":
            out.append("".join(buf).strip())
            buf = []
            pending = True
        else:
            buf.append(ch)
            pending = False
        i += 1
    if quote:
        raise ParseError("unterminated quote", line, path)
    last = "".join(buf).strip()
    if last or pending or out:
        out.append(last)
    return out


def _arff_name_and_rest(text, line, path):
    text = text.strip()
    if not text:
        raise ParseError("attribute declaration without a name", line, path)
    if text[0] in "'\"":
        end = text.find(text[0], 1)
        if end < 0:
            raise ParseError("unterminated quoted attribute name", line, path)
        return text[1:end], text[end + 1 :].strip()
    parts = text.split(None, 1)
    if len(parts) < 2:
        raise ParseError(f"attribute {parts[0]!r} has no type", line, path)
    return parts[0], parts[1].strip()


def _read_arff_header(lines, path):
    """Consume header lines up to @data; returns [(name, nominal domain or None)]."""
    raw = []
    seen_relation = False
    for lineno, rawline in lines:
        text = rawline.strip()
        if not text or text.startswith("%"):
            continue
        low = text.lower()
        if low.startswith("@relation"):
            seen_relation = True
        elif low.startswith("@attribute"):
            name, kind = _arff_name_and_rest(text[len("@attribute") :], lineno, path)
            if kind.startswith("{"):
                if not kind.endswith("}"):
                    raise ParseError(f"unterminated nominal domain for {name!r}", lineno, path)
                domain = tuple(_split_arff(kind[1:-1], lineno, path))
                if not domain or any(d == "" for d in domain):
                    raise ParseError(f"empty nominal value in domain of {name!r}", lineno, path)
                raw.append((name, domain))
            elif kind.lower() in _NUMERIC_TYPES:
                raw.append((name, None))
            else:
                raise ParseError(f"unsupported attribute type {kind!r} for {name!r}", lineno, path)
        elif low.startswith("@data"):
            if not seen_relation:
                raise ParseError("@data before @relation", lineno, path)
            if not raw:
                raise ParseError("no @attribute declarations", lineno, path)
            return raw
        else:
            raise ParseError(f"unexpected header line {text[:40]!r}", lineno, path)
    raise ParseError("missing @data section", None, path)


def _schema_from_arff(raw, path):
    nominal = [i for i, (_, dom) in enumerate(raw) if dom is not None]
    if not nominal:
        raise ParseError("no nominal attribute available as class label", None, path)
    cls = nominal[-1]
    attrs = []
    for i, (name, dom) in enumerate(raw):
        if i == cls:
            attrs.append(AttributeDescriptor(name, Role.CLASS))
        elif dom is None:
            attrs.append(AttributeDescriptor(name, Role.NUMERIC))
        else:
            attrs.append(AttributeDescriptor(name, Role.NOMINAL, domain=dom))
    try:
        return Schema(tuple(attrs), raw[cls][1])
    except ValidationError as e:
        raise ParseError(str(e), None, path) from None


def open_arff(source, limit: int | None = None) -> tuple[Schema, Iterator[Instance]]:
    src = _as_source(source, "arff")
    path = src.path
    fh = open(path, encoding="utf-8", newline="")
    lines = enumerate((ln.rstrip("\r\n") for ln in fh), start=1)
    try:
        raw = _read_arff_header(lines, path)
        schema = src.declared_schema or _schema_from_arff(raw, path)
        if len(schema.attributes) != len(raw):
            raise ParseError(
                f"declared schema has {len(schema.attributes)} attributes, file has {len(raw)}",
                None,
                path,
            )
    except BaseException:
        fh.close()
        raise

    def rows():
        with fh:
            seq = 0
            for lineno, rawline in lines:
                if limit is not None and seq >= limit:
                    return
                text = rawline.strip()
                if not text or text.startswith("%"):
                    continue
                if text.startswith("{"):
                    raise ParseError("sparse ARFF rows are not supported", lineno, path)
                tokens = _split_arff(text, lineno, path)
                yield _convert_row(tokens, schema, seq, lineno, path)
                seq += 1

    return schema, rows()


def load_arff(source, limit: int | None = None) -> tuple[Schema, list[Instance]]:
    schema, rows = open_arff(source, limit)
    return schema, list(rows)


# ---------------------------------------------------------------------- CSV


def _is_real(token):
    try:
        return math.isfinite(float(token))
    except ValueError:
        return False


def _csv_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            yield reader.line_num, [t.strip() for t in row]


def _infer_csv_schema(path, limit):
    rows = _csv_rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty CSV file (header row required)", None, path) from None
    if len(header) < 2:
        raise ParseError("CSV needs at least one feature column and a class column", 1, path)
    numeric = [True] * len(header)
    classes = {}
    n = 0
    for lineno, row in itertools.islice(rows, limit):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno, path)
        for j, tok in enumerate(row):
            if tok == "?" or tok == "":
                raise ParseError(f"missing value in column {header[j]!r}", lineno, path)
            if numeric[j] and not _is_real(tok):
                numeric[j] = False
        classes.setdefault(row[-1], None)
        n += 1
    if n == 0:
        raise ParseError("CSV has a header but no data rows", None, path)
    attrs = []
    for j, name in enumerate(header):
        if j == len(header) - 1:
            role = Role.CLASS
        else:
            role = Role.NUMERIC if numeric[j] else Role.NOMINAL
        attrs.append(AttributeDescriptor(name, role))
    try:
        return Schema(tuple(attrs), tuple(classes))
    except ValidationError as e:
        raise ParseError(str(e), 1, path) from None


def open_csv(source, limit: int | None = None) -> tuple[Schema, Iterator[Instance]]:
    """Headed CSV. Without a declared schema, columns are typed by a first
    pass (numeric iff every row parses as a real), then rows stream lazily."""
    src = _as_source(source, "csv")
    path = src.path
    if src.declared_schema is None:
        schema = _infer_csv_schema(path, limit)
    else:
        schema = src.declared_schema
    rows = _csv_rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty CSV file (header row required)", None, path) from None
    if len(header) != len(schema.attributes):
        raise ParseError(
            f"header has {len(header)} columns, schema expects {len(schema.attributes)}", 1, path
        )

    def gen():
        for seq, (lineno, row) in enumerate(itertools.islice(rows, limit)):
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno, path)
            yield _convert_row(row, schema, seq, lineno, path)

    return schema, gen()


def load_csv(source, limit: int | None = None) -> tuple[Schema, list[Instance]]:
    schema, rows = open_csv(source, limit)
    return schema, list(rows)


def open_source(source: DatasetSource, limit: int | None = None):
    if source.format == "arff":
        return open_arff(source, limit)
    return open_csv(source, limit)


def load(source: DatasetSource, limit: int | None = None) -> tuple[Schema, list[Instance]]:
    schema, rows = open_source(source, limit)
    return schema, list(rows)


def write_csv(schema: Schema, instances: Sequence[Instance], path) -> None:
    """Canonical CSV: header of attribute names, reals via ``repr`` (exact)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(schema.names)
        for inst in instances:
            w.writerow([repr(v) if isinstance(v, float) else v for v in inst.values])


# ---------------------------------------------------------------- synthetic


def synth_gaussian_stream(
    num_clusters: int,
    dims: int,
    per_cluster: int,
    separation: float,
    spread: float,
    seed: int = 0,
    max_tries: int = 10_000,
) -> tuple[Schema, list[Instance]]:
    """Isotropic Gaussian blobs interleaved round-robin into one stream.

    Centers are drawn uniformly from a cube sized so that ``num_clusters``
    points ``separation`` apart fit comfortably, and rejected until all
    pairwise distances reach ``separation``. Labels are blob ids ``"0"``,
    ``"1"``, ... and features are named ``x0``, ``x1``, ...
    """
    if num_clusters < 1 or dims < 1 or per_cluster < 1:
        raise ValidationError("num_clusters, dims and per_cluster must be >= 1")
    if not (separation > 0 and spread > 0):
        raise ValidationError("separation and spread must be positive")
    rng = np.random.default_rng(seed)
    centers = _place_centers(rng, num_clusters, dims, separation, max_tries)
    pts = rng.normal(0.0, spread, size=(per_cluster, num_clusters, dims)) + centers[None]

    names = [f"x{i}" for i in range(dims)]
    domain = tuple(str(c) for c in range(num_clusters))
    attrs = [AttributeDescriptor(n, Role.NUMERIC) for n in names]
    attrs.append(AttributeDescriptor("class", Role.CLASS))
    schema = Schema(tuple(attrs), domain)
    stream = []
    for i in range(per_cluster):
        for c in range(num_clusters):
            row = tuple(float(v) for v in pts[i, c]) + (domain[c],)
            stream.append(Instance(row, len(stream)))
    return schema, stream


def _place_centers(rng, num_clusters, dims, separation, max_tries):
    side = separation * max(2.0, 2.0 * num_clusters ** (1.0 / dims))
    centers = []
    tries = 0
    while len(centers) < num_clusters:
        if tries >= max_tries:
            raise ValidationError(
                f"could not place {num_clusters} centers {separation} apart in {max_tries} tries"
            )
        tries += 1
        c = rng.uniform(-side / 2, side / 2, size=dims)
        if all(np.linalg.norm(c - o) >= separation for o in centers):
            centers.append(c)
    return np.array(centers)


def synth_centers(num_clusters, dims, separation, seed=0, max_tries=10_000):
    """Blob centers ``synth_gaussian_stream`` draws for the same arguments."""
    rng = np.random.default_rng(seed)
    return _place_centers(rng, num_clusters, dims, separation, max_tries)
