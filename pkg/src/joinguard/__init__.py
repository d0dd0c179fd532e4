"""Pre-join re-identification risk assessment for tabular data."""

from .assess import Direction, LeakageAssessment, assess_pair, direction, leakage_signal
from .errors import (
    AssessmentError,
    IngestError,
    JoinError,
    JoinExplosionError,
    JoinGuardError,
    MetricError,
    PersistenceError,
    TrainingError,
    UnknownColumnError,
)
from .evaluation import EvalReport, direction_accuracy, evaluate, rank_correlation, regression_metrics
from .join import JoinSpec, estimate_join_cardinality, join, parse_keys
from .metrics import (
    GroupHistogram,
    UniquenessReport,
    group_counts,
    k_anonymity,
    small_group_fraction,
    uniqueness_ratio,
    uniqueness_report,
)
from .predictor import GbdtModel, Hyperparams, baseline_constant, load_model, predict, save_model, train
from .synth import GeneratorParams, LabeledCorpus, LabeledExample, generate_corpus, generate_pair
from .tabular import MISSING, ColumnSpec, IngestOptions, Table, canonicalize_value, load_table, project

__version__ = "0.1.0"
