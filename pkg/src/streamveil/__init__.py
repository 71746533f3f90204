"""Tuple-value multiplicative perturbation for privacy-preserving stream clustering."""

from .cluster import (
    KMeansModel,
    Window,
    feature_matrix,
    iter_windows,
    kmeans_assign,
    kmeans_fit,
    window_partition,
)
from .errors import ParseError, PipelineError, StreamVeilError, ValidationError
from .evaluate import (
    CMM,
    ClusterMatching,
    ContingencyTable,
    WindowReport,
    best_matching,
    build_cmm,
    cmm_accuracy,
    contingency,
    misclassification,
    precision_measure,
    recall_measure,
)
from .ingest import DatasetSource, load_arff, load_csv, synth_gaussian_stream, write_csv
from .perturb import (
    PerturbationConfig,
    StatsMode,
    TupleValueRecord,
    perturb_instance,
    perturb_stream,
    tuple_value,
)
from .pipeline import PipelineConfig, RunReport, emit_report, run_pipeline
from .schema import AttributeDescriptor, Instance, Role, Schema
from .stats import RunningStats, StatsTable, stats_merge, stats_update, zscore

__version__ = "0.1.0"
