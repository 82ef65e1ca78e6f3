"""End-to-end glue: attribute tables, training sets, filtering, reports.

The staged CLI and the experiment harness both compose the per-module
operations through these helpers, so a battery experiment and a run over
externally produced matrices share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import AttributeVector, SmoothingParams, extract_attributes
from .errors import DataError
from .evaluation import (
    EvalReport,
    ReductionRow,
    entries_from_decisions,
    entries_from_matches,
    evaluate_pair,
)
from .filters import FilterConfig, MatchDecision, remove_matches, restore_matches
from .labeling import OutcomeLabel, label_queries
from .matrixio import DistanceMatrix, GroundTruth, normalize_slice, slice_query
from .mlp import (
    MlpModel,
    PredictionScores,
    TrainConfig,
    macro_f1,
    smote_oversample,
    train,
)
from .seqmatch import MatchSet, best_matches, sequence_match
from .synth import Scenario


def attribute_table(
    D: DistanceMatrix, L: int, K: int, params: SmoothingParams,
    queries: range | None = None,
) -> dict[int, list[AttributeVector]]:
    """Attribute vectors for ranks 0..K-1 of every query with full history."""
    if queries is None:
        queries = range(L - 1, D.cols)
    table = {}
    for j in queries:
        s = normalize_slice(slice_query(D, j, L))
        table[j] = extract_attributes(s, K, params)
    return table


def rank0_features(table: dict[int, list[AttributeVector]]) -> tuple[list[int], np.ndarray]:
    """Classifier inputs: the rank-0 vector per query, in query order."""
    queries = sorted(table)
    X = np.vstack([table[j][0].as_array() for j in queries])
    return queries, X


def training_arrays(
    table: dict[int, list[AttributeVector]], labels: list[OutcomeLabel]
) -> tuple[np.ndarray, np.ndarray]:
    X, y = [], []
    for lab in labels:
        if lab.query_index not in table:
            raise DataError(f"no attributes for labeled query {lab.query_index}")
        X.append(table[lab.query_index][0].as_array())
        y.append(lab.y)
    if not X:
        raise DataError("no labeled queries with attributes")
    return np.vstack(X), np.array(y, dtype=np.int64)


def predictions_for(
    model: MlpModel, table: dict[int, list[AttributeVector]]
) -> dict[int, PredictionScores]:
    """Batch rank-0 inference over an attribute table."""
    queries, X = rank0_features(table)
    probs = model.forward(X)
    return {
        j: PredictionScores(query_index=j, probs=probs[i], predicted_class=int(np.argmax(probs[i])))
        for i, j in enumerate(queries)
    }


def oracle_predictions(labels: list[OutcomeLabel]) -> dict[int, PredictionScores]:
    """Perfect predictor: probability 1 on the true outcome class."""
    out = {}
    for lab in labels:
        probs = np.zeros(4)
        probs[lab.y] = 1.0
        out[lab.query_index] = PredictionScores(
            query_index=lab.query_index, probs=probs, predicted_class=lab.y
        )
    return out


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    baseline: EvalReport
    filtered: EvalReport
    reduction: ReductionRow
    decisions: tuple[MatchDecision, ...]
    matches: MatchSet


def apply_filters(
    D: DistanceMatrix,
    gt: GroundTruth,
    model: MlpModel,
    L: int,
    filter_cfg: FilterConfig,
    params: SmoothingParams,
    restore: bool = False,
    query_range: tuple[int, int] | None = None,
    name: str = "",
    preds: dict[int, PredictionScores] | None = None,
) -> ScenarioResult:
    """Sequence-match, predict, filter, and score one matrix end to end.

    ``query_range`` restricts scoring (and prediction) to [lo, hi); sequence
    matching itself always sees the whole matrix. Pass ``preds`` to swap in
    an external predictor (e.g. a label oracle).
    """
    Dseq = sequence_match(D, L)
    depth = filter_cfg.restoration_depth + 1 if restore else 1
    matches = best_matches(Dseq, depth)
    lo, hi = query_range if query_range else (Dseq.valid_from, D.cols)
    lo = max(lo, Dseq.valid_from)

    table = attribute_table(D, L, depth, params, queries=range(lo, hi))
    if preds is None:
        preds = predictions_for(model, table)

    decisions = remove_matches(matches, preds, filter_cfg, valid_from=lo)
    decisions = [d for d in decisions if lo <= d.query_index < hi]
    if restore:
        decisions = restore_matches(decisions, matches, table, model, filter_cfg)

    base_entries = [e for e in entries_from_matches(matches, valid_from=lo) if e[0] < hi]
    filt_entries = entries_from_decisions(decisions, matches, valid_from=lo)
    base, filt, reduction = evaluate_pair(base_entries, filt_entries, gt)
    return ScenarioResult(
        name=name,
        baseline=base,
        filtered=filt,
        reduction=reduction,
        decisions=tuple(decisions),
        matches=matches,
    )


def battery_tables(
    scenarios: list[Scenario], L: int, params: SmoothingParams, train_fraction: float
):
    """Per-scenario label/attribute arrays split into train and test segments.

    The leading ``train_fraction`` of each scenario's queries is the train
    segment; the rest is the test segment (geographically separate, in the
    synthetic analogy).
    """
    pooled = {"train": ([], []), "test": ([], [])}
    split_at = {}
    for sc in scenarios:
        cut = int(sc.matrix.cols * train_fraction)
        split_at[sc.name] = cut
        Dseq = sequence_match(sc.matrix, L)
        labels = label_queries(sc.matrix, Dseq, sc.gt)
        table = attribute_table(sc.matrix, L, 1, params)
        X, y = training_arrays(table, labels)
        queries = np.array([lab.query_index for lab in labels])
        for part, keep in (("train", queries < cut), ("test", queries >= cut)):
            pooled[part][0].append(X[keep])
            pooled[part][1].append(y[keep])
    train_x = np.vstack(pooled["train"][0])
    train_y = np.concatenate(pooled["train"][1])
    test_x = np.vstack(pooled["test"][0])
    test_y = np.concatenate(pooled["test"][1])
    return train_x, train_y, test_x, test_y, split_at


def fit_and_score(
    train_x: np.ndarray,
    train_y: np.ndarray,
    test_x: np.ndarray,
    test_y: np.ndarray,
    train_cfg: TrainConfig,
    attribute_mask: tuple[int, ...] | None = None,
    trained_on: str = "battery",
) -> tuple[MlpModel, float]:
    """SMOTE-balance, train, and macro-F1 score one attribute selection."""
    if attribute_mask is not None:
        train_x = train_x[:, list(attribute_mask)]
        test_x = test_x[:, list(attribute_mask)]
    bx, by = smote_oversample(train_x, train_y, seed=train_cfg.seed)
    model = train(bx, by, train_cfg, trained_on=trained_on)
    preds = np.argmax(model.forward(test_x), axis=1)
    return model, macro_f1(test_y, preds)


def train_battery_model(
    scenarios: list[Scenario],
    L: int,
    train_cfg: TrainConfig,
    params: SmoothingParams,
    train_fraction: float = 0.4,
    attribute_mask: tuple[int, ...] | None = None,
) -> tuple[MlpModel, float]:
    """Pool train-segment rows across scenarios, balance, train, test.

    Returns the model and its macro F1 on the pooled test segment.
    ``attribute_mask`` selects a subset of the four attribute columns, for
    per-attribute ablations.
    """
    train_x, train_y, test_x, test_y, _ = battery_tables(
        scenarios, L, params, train_fraction
    )
    return fit_and_score(train_x, train_y, test_x, test_y, train_cfg, attribute_mask)


@dataclass(frozen=True)
class BatteryExperiment:
    model: MlpModel
    predictor_f1: float
    results: list[ScenarioResult]

    @property
    def mean_reduction(self) -> float:
        return float(np.mean([r.reduction.reduction_percent for r in self.results]))

    @property
    def improved_fraction(self) -> float:
        ok = [r.filtered.aoc <= r.baseline.aoc for r in self.results]
        return float(np.mean(ok))


def run_battery_experiment(
    scenarios: list[Scenario],
    L: int,
    train_cfg: TrainConfig,
    filter_cfg: FilterConfig,
    params: SmoothingParams,
    train_fraction: float = 0.4,
    restore: bool = False,
) -> BatteryExperiment:
    """Train on the leading segment of every scenario, filter the rest."""
    model, f1 = train_battery_model(
        scenarios, L, train_cfg, params, train_fraction=train_fraction
    )
    results = []
    for sc in scenarios:
        cut = int(sc.matrix.cols * train_fraction)
        results.append(
            apply_filters(
                sc.matrix,
                sc.gt,
                model,
                L,
                filter_cfg,
                params,
                restore=restore,
                query_range=(cut, sc.matrix.cols),
                name=sc.name,
            )
        )
    return BatteryExperiment(model=model, predictor_f1=f1, results=results)
