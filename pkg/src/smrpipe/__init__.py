"""Sequence-matching receptiveness pipeline for visual place recognition.

Predicts, per query frame, whether sequence matching will produce a correct
match, and uses the prediction to remove (and optionally restore) matches.
"""

__version__ = "0.1.0"

from .attributes import (
    AttributeVector,
    DiagonalMatrix,
    SmoothingParams,
    diagonal_entries,
    extract_attributes,
    global_block_sum_rate,
    global_group_sum_rate,
    load_attribute_records,
    minimum_sum_rate,
    minimum_value_rate,
    save_attribute_records,
)
from .errors import (
    CoverageError,
    DataError,
    FormatError,
    IoError,
    NumericsError,
    RangeError,
    ShapeError,
    SmrError,
    SpecError,
)
from .evaluation import (
    EvalReport,
    PrCurve,
    PrPoint,
    ReductionRow,
    auc_aoc,
    compare_reports,
    entries_from_decisions,
    entries_from_matches,
    evaluate_entries,
    evaluate_pair,
    pr_curve,
    report_table,
)
from .filters import (
    KEPT,
    REMOVED,
    RESTORED,
    FilterConfig,
    MatchDecision,
    remove_matches,
    restore_matches,
)
from .labeling import OutcomeLabel, label_queries
from .matrixio import (
    DistanceMatrix,
    GroundTruth,
    QuerySlice,
    load_ground_truth,
    load_matrix,
    normalize_slice,
    save_ground_truth,
    save_matrix,
    slice_query,
)
from .mlp import (
    MlpModel,
    PredictionScores,
    TrainConfig,
    load_model,
    macro_f1,
    predict,
    save_model,
    smote_oversample,
    stratified_kfold_f1,
    train,
)
from .seqmatch import MatchSet, SeqDistanceMatrix, best_matches, sequence_match
from .synth import AliasBand, Burst, Scenario, ScenarioSpec, generate, scenario_battery
