"""Predictor-driven match filters: removal, then optional restoration.

Removal acts at the maximum-recall operating point of the sequence-matched
system: every query's unthresholded best match is either kept or discarded,
depending on whether the predictor's removal score (confidence the match is
incorrect after sequence matching) reaches the trust threshold.

Restoration re-scores the next ranked candidates of each removed query with
the same predictor, using the attribute vector at the candidate's rank, and
promotes the most credible one if its keep-confidence clears the
restoration threshold.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace

from .attributes import AttributeVector
from .errors import CoverageError, RangeError
from .mlp import MlpModel, PredictionScores, predict
from .seqmatch import MatchSet

KEPT = "kept"
REMOVED = "removed"
RESTORED = "restored"


@dataclass(frozen=True)
class FilterConfig:
    trust_threshold: float = 0.5
    restoration_depth: int = 3
    restoration_threshold: float = 0.91

    def __post_init__(self):
        if not 0.0 <= self.trust_threshold <= 1.0:
            raise RangeError(f"trust threshold must be in [0,1], got {self.trust_threshold}")
        if not 0.0 <= self.restoration_threshold <= 1.0:
            raise RangeError(
                f"restoration threshold must be in [0,1], got {self.restoration_threshold}"
            )
        if self.restoration_depth < 1:
            raise RangeError(f"restoration depth must be >= 1, got {self.restoration_depth}")


@dataclass(frozen=True)
class MatchDecision:
    """Final per-query verdict after the filters."""

    query_index: int
    original_ref: int
    verdict: str  # kept | removed | restored
    final_ref: int | None
    removal_score: float
    restore_scores: tuple[float, ...] = field(default=())


def remove_matches(
    matches: MatchSet,
    preds: Mapping[int, PredictionScores],
    cfg: FilterConfig,
    valid_from: int = 0,
) -> list[MatchDecision]:
    """Discard best matches whose removal score reaches the trust threshold.

    Queries before ``valid_from`` (no full sequence support) pass through as
    kept. Every other query must have a prediction.
    """
    decisions = []
    for j in range(matches.num_queries):
        ref = matches.best_ref(j)
        if j < valid_from:
            decisions.append(
                MatchDecision(j, ref, KEPT, final_ref=ref, removal_score=0.0)
            )
            continue
        pred = preds.get(j)
        if pred is None:
            raise CoverageError(f"no prediction for query {j}")
        score = pred.removal_score
        if score >= cfg.trust_threshold:
            decisions.append(MatchDecision(j, ref, REMOVED, None, score))
        else:
            decisions.append(MatchDecision(j, ref, KEPT, ref, score))
    return decisions


def restore_matches(
    decisions: Sequence[MatchDecision],
    matches: MatchSet,
    attr_provider: Mapping[int, Sequence[AttributeVector]],
    model: MlpModel,
    cfg: FilterConfig,
) -> list[MatchDecision]:
    """Promote the most credible next-ranked candidate of each removed match.

    Candidate rank r (1..restoration_depth) is scored with the rank-r
    attribute vector; the best candidate is restored only if its
    keep-confidence is at least the restoration threshold. Kept matches are
    never touched.
    """
    if matches.depth < cfg.restoration_depth + 1:
        raise RangeError(
            f"match set depth {matches.depth} cannot serve "
            f"{cfg.restoration_depth} restoration candidates"
        )
    out = []
    for d in decisions:
        if d.verdict != REMOVED:
            out.append(d)
            continue
        attrs = attr_provider.get(d.query_index)
        if attrs is None or len(attrs) < cfg.restoration_depth + 1:
            raise CoverageError(
                f"query {d.query_index} lacks attributes for "
                f"{cfg.restoration_depth} restoration candidates"
            )
        scores = tuple(
            predict(model, attrs[r]).keep_confidence
            for r in range(1, cfg.restoration_depth + 1)
        )
        best = max(range(len(scores)), key=lambda i: (scores[i], -i))
        if scores[best] >= cfg.restoration_threshold:
            ref = int(matches.ranked_refs[d.query_index, best + 1])
            out.append(
                replace(d, verdict=RESTORED, final_ref=ref, restore_scores=scores)
            )
        else:
            out.append(replace(d, restore_scores=scores))
    return out
