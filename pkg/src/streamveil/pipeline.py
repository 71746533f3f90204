"""End-to-end run: load D, perturb to D', cluster both per window, compare.

Windows are processed one batch at a time (one window per worker), so
beyond the loaded input only O(w) perturbed tuples and the fitted models
are alive at any moment.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import islice
from pathlib import Path
from typing import Sequence

import numpy as np

from . import cluster
from .cluster import Window, feature_matrix, iter_windows, kmeans_fit
from .errors import PipelineError, StreamVeilError, ValidationError
from .evaluate import (
    WindowReport,
    best_matching,
    build_cmm,
    cmm_accuracy,
    contingency,
    precision_measure,
    recall_measure,
)
from .ingest import DatasetSource, open_source
from .perturb import PerturbationConfig, StatsMode, iter_perturbed
from .schema import Instance, Schema
from .stats import StatsTable

THREADS_ENV = "STREAMVEIL_THREADS"
WINDOW_FIELDS = [
    "window_index",
    "n",
    "precision_orig",
    "recall_orig",
    "precision_pert",
    "recall_pert",
    "accuracy_pct",
    "misclassification_pct",
]
_METRICS = WINDOW_FIELDS[2:]


@dataclass(frozen=True)
class PipelineConfig:
    source: DatasetSource | None
    sensitive: tuple[str, ...]
    k: int = cluster.DEFAULT_K
    w: int = cluster.DEFAULT_WINDOW
    seed: int = 42
    stats_mode: StatsMode = StatsMode.TWO_PASS
    limit: int | None = None
    cluster_on_zscores: bool = False
    output_dir: Path | None = None
    max_iter: int = cluster.DEFAULT_MAX_ITER
    tol: float = cluster.DEFAULT_TOL
    n_init: int = cluster.DEFAULT_N_INIT
    pre_normalized: frozenset[str] = frozenset()
    threads: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sensitive", tuple(self.sensitive))
        object.__setattr__(self, "stats_mode", StatsMode(self.stats_mode))
        object.__setattr__(self, "pre_normalized", frozenset(self.pre_normalized))
        if self.output_dir is not None:
            object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.w < 1:
            raise ValidationError(f"window size must be >= 1, got {self.w}")
        if self.limit is not None and self.limit < 1:
            raise ValidationError(f"limit must be >= 1, got {self.limit}")
        if not self.sensitive:
            raise ValidationError("at least one sensitive attribute is required")
        if self.threads is not None and self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")

    def perturbation(self) -> PerturbationConfig:
        return PerturbationConfig(frozenset(self.sensitive), self.stats_mode, self.pre_normalized)

    def echo(self) -> dict:
        src = self.source
        return {
            "input": None if src is None else str(src.path),
            "format": None if src is None else src.format,
            "sensitive": list(self.sensitive),
            "k": self.k,
            "window": self.w,
            "seed": self.seed,
            "stats_mode": self.stats_mode.value,
            "limit": self.limit,
            "cluster_on_zscores": self.cluster_on_zscores,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "n_init": self.n_init,
            "pre_normalized": sorted(self.pre_normalized),
        }


@dataclass
class RunReport:
    config: dict
    dataset: str
    n_instances: int
    per_window: list[WindowReport]
    aggregate: dict
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_window"] = [w.to_dict() for w in self.per_window]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> RunReport:
        d = dict(d)
        d["per_window"] = [WindowReport(**w) for w in d["per_window"]]
        return cls(**d)

    def deterministic_dict(self) -> dict:
        """Everything except wall-clock timing."""
        d = self.to_dict()
        d.pop("timing")
        return d

    def all_finite(self) -> bool:
        vals = [getattr(w, m) for w in self.per_window for m in _METRICS]
        vals += [v for v in self.aggregate.values() if isinstance(v, float)]
        return all(math.isfinite(v) for v in vals)


def _zscore_columns(x: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=0)
    sd = x.std(axis=0, ddof=1) if len(x) > 1 else np.zeros(x.shape[1])
    out = np.zeros_like(x)
    ok = sd > 0
    out[:, ok] = (x[:, ok] - mean[ok]) / sd[ok]
    return out


def evaluate_window(
    orig: Window, pert: Window, schema: Schema, cfg: PipelineConfig
) -> WindowReport:
    """Cluster one aligned window pair and score it."""
    if [i.sequence_id for i in orig.instances] != [i.sequence_id for i in pert.instances]:
        raise ValidationError(f"window {orig.index}: original and perturbed tuples are misaligned")
    xo = feature_matrix(orig, schema)
    xp = feature_matrix(pert, schema)
    if cfg.cluster_on_zscores:
        xo, xp = _zscore_columns(xo), _zscore_columns(xp)
    # A short final window may hold fewer tuples than k.
    k = min(cfg.k, len(orig))
    kw = dict(k=k, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol, n_init=cfg.n_init)
    mo = kmeans_fit(xo, **kw)
    mp = kmeans_fit(xp, **kw)

    cmm = build_cmm(mo.labels, mp.labels, k, k)
    acc = cmm_accuracy(cmm, best_matching(cmm))
    labels = [inst.values[schema.class_index] for inst in orig.instances]
    ct_o = contingency(mo.labels, labels, k, schema.class_domain)
    ct_p = contingency(mp.labels, labels, k, schema.class_domain)
    return WindowReport(
        window_index=orig.index,
        n=len(orig),
        precision_orig=precision_measure(ct_o),
        recall_orig=recall_measure(ct_o),
        precision_pert=precision_measure(ct_p),
        recall_pert=recall_measure(ct_p),
        accuracy_pct=acc,
        misclassification_pct=100.0 - acc,
    )


def aggregate(per_window: Sequence[WindowReport]) -> dict:
    """Count-weighted means of every per-window metric."""
    n = np.array([w.n for w in per_window], dtype=float)
    out = {"n": int(n.sum()), "windows": len(per_window)}
    for m in _METRICS:
        vals = np.array([getattr(w, m) for w in per_window])
        out[m] = float(np.dot(vals, n) / n.sum())
    return out


def worker_count(cfg: PipelineConfig) -> int:
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ValidationError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def run_pipeline(
    cfg: PipelineConfig, data: tuple[Schema, Sequence[Instance]] | None = None
) -> RunReport:
    """Run the whole comparison. ``data`` bypasses loading (in-memory streams)."""
    t0 = time.perf_counter()
    timing = {}
    stage = "load"
    try:
        if data is None:
            if cfg.source is None:
                raise ValidationError("no input source configured")
            schema, rows = open_source(cfg.source, cfg.limit)
            stream = list(rows)
            dataset = cfg.source.path.stem
        else:
            schema, stream = data
            stream = list(islice(stream, cfg.limit))
            dataset = "in-memory"
        if not stream:
            raise ValidationError("input stream is empty")
        timing["load_s"] = time.perf_counter() - t0

        stage = "perturb"
        t = time.perf_counter()
        pcfg = cfg.perturbation()
        pcfg.check(schema)
        schema = schema.with_sensitive(pcfg.sensitive)
        for inst in stream:
            schema.validate(inst)
        stats = None
        if pcfg.stats_mode is StatsMode.TWO_PASS:
            stats = StatsTable.from_instances(stream, schema)
        perturbed = (
            inst for inst, _ in iter_perturbed(stream, schema, pcfg, stats, validate=False)
        )
        timing["stats_s"] = time.perf_counter() - t

        stage = "cluster+evaluate"
        t = time.perf_counter()
        pairs = zip(iter_windows(stream, cfg.w), iter_windows(perturbed, cfg.w))
        workers = worker_count(cfg)
        reports: list[WindowReport] = []
        if workers == 1:
            reports = [evaluate_window(o, p, schema, cfg) for o, p in pairs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                while batch := list(islice(pairs, workers)):
                    futs = [pool.submit(evaluate_window, o, p, schema, cfg) for o, p in batch]
                    reports.extend(f.result() for f in futs)
        timing["windows_s"] = time.perf_counter() - t

        stage = "report"
        agg = aggregate(reports)
    except (StreamVeilError, OSError) as e:
        raise PipelineError(stage, e) from e
    timing["total_s"] = time.perf_counter() - t0
    return RunReport(cfg.echo(), dataset, len(stream), reports, agg, timing)


def _summary_text(report: RunReport) -> str:
    agg = report.aggregate
    cfg = report.config
    lines = [
        "Clustering agreement between original and perturbed streams",
        "",
        f"{'Dataset':<24}{'Perturbed':<24}{'% Accuracy':>12}",
        f"{report.dataset:<24}{', '.join(cfg['sensitive']):<24}{agg['accuracy_pct']:>11.2f}%",
        "",
        f"instances: {report.n_instances}  windows: {agg['windows']}  "
        f"k: {cfg['k']}  w: {cfg['window']}  stats: {cfg['stats_mode']}  seed: {cfg['seed']}",
        f"misclassification: {agg['misclassification_pct']:.2f}%",
        f"precision  original {agg['precision_orig']:.4f}  perturbed {agg['precision_pert']:.4f}",
        f"recall     original {agg['recall_orig']:.4f}  perturbed {agg['recall_pert']:.4f}",
    ]
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, out_dir) -> list[Path]:
    """Write report.json, windows.csv and summary.txt into ``out_dir``."""
    out = Path(out_dir)
    paths = [out / "report.json", out / "windows.csv", out / "summary.txt"]
    current = out
    try:
        out.mkdir(parents=True, exist_ok=True)
        current = paths[0]
        with open(current, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        current = paths[1]
        with open(current, "w", encoding="utf-8", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(WINDOW_FIELDS)
            for w in report.per_window:
                wr.writerow([repr(getattr(w, f)) for f in WINDOW_FIELDS])
        current = paths[2]
        current.write_text(_summary_text(report), encoding="utf-8")
    except OSError as e:
        raise PipelineError("emit", f"cannot write {current}: {e}") from e
    return paths


def read_report(path) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))
