"""Precision-recall machinery and system-vs-system comparison.

A proposal set is a list of ``(query, ref, score)`` entries, one per scored
query; ``ref`` is None for removed matches and ``score`` is the match
distance (lower = more confident). The threshold sweep negates distances
into confidences, so the curve depends only on score order:

- accepted at a threshold: match proposed and confidence >= threshold;
- true positive: accepted and within ground-truth tolerance;
- false positive: accepted and outside tolerance;
- false negative: not accepted, including removed matches, which are never
  accepted at any threshold.

Area under the curve integrates precision over recall up to the operating
range (trapezoids over the swept points, first precision extended flat to
recall 0, no synthetic anchor points). Area over the curve is the distance
to ideal precision 1 across that range, so AUC + AOC equals the range
exactly and AOC 0 means perfect precision up to max recall. To compare two
systems, both are integrated to the filtered system's max recall.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, RangeError
from .matrixio import GroundTruth
from .seqmatch import MatchSet

# (query index, proposed reference or None, distance score)
MatchEntry = tuple[int, int | None, float]


@dataclass(frozen=True)
class PrPoint:
    threshold: float  # confidence threshold (negated distance)
    precision: float
    recall: float


@dataclass(frozen=True)
class PrCurve:
    points: tuple[PrPoint, ...]
    max_recall: float


@dataclass(frozen=True)
class EvalReport:
    """PR summary of one system at one operating range."""

    recall_cap: float  # integration range actually used
    max_recall: float  # largest recall the system attains
    auc: float
    aoc: float
    precision_at_cap: float
    recall_at_cap: float
    f1_at_cap: float


@dataclass(frozen=True)
class ReductionRow:
    baseline_aoc: float
    filtered_aoc: float
    reduction_percent: float

    def formatted(self) -> str:
        return (
            f"{self.baseline_aoc:.4f} {self.filtered_aoc:.4f} "
            f"{self.reduction_percent:.2f}"
        )


def entries_from_matches(matches: MatchSet, valid_from: int = 0) -> list[MatchEntry]:
    """Best-match proposals for every query with full sequence support."""
    return [
        (j, matches.best_ref(j), matches.best_score(j))
        for j in range(valid_from, matches.num_queries)
    ]


def entries_from_decisions(decisions, matches: MatchSet, valid_from: int = 0) -> list[MatchEntry]:
    """Filter verdicts turned into proposals; removed queries carry no match.

    Restored matches are scored with the promoted candidate's own distance.
    """
    ranked = {}
    for d in decisions:
        if d.query_index < valid_from:
            continue
        if d.final_ref is None:
            ranked[d.query_index] = (None, math.nan)
        else:
            row = matches.ranked_refs[d.query_index]
            hits = np.nonzero(row == d.final_ref)[0]
            if hits.size == 0:
                raise DataError(
                    f"final ref {d.final_ref} for query {d.query_index} "
                    "is not among its ranked candidates"
                )
            score = float(matches.ranked_scores[d.query_index, hits[0]])
            ranked[d.query_index] = (d.final_ref, score)
    return [(j, ref, score) for j, (ref, score) in sorted(ranked.items())]


def pr_curve(entries: list[MatchEntry], gt: GroundTruth) -> PrCurve:
    """Sweep a descending confidence threshold over the proposal set."""
    if not entries:
        raise DataError("no queries to evaluate")
    total = len(entries)
    active = [(j, ref, score) for j, ref, score in entries if ref is not None]
    for j, _, score in active:
        if not math.isfinite(score):
            raise DataError(f"non-finite score for query {j}")
    if not active:
        return PrCurve(points=(), max_recall=0.0)

    conf = np.array([-score for _, _, score in active])
    correct = np.array([gt.is_correct(ref, j) for j, ref, _ in active])
    order = np.argsort(-conf, kind="stable")
    conf, correct = conf[order], correct[order]

    points = []
    tp = fp = 0
    i = 0
    n = len(conf)
    while i < n:
        # accept every entry tied at this confidence in one step
        threshold = conf[i]
        while i < n and conf[i] == threshold:
            tp += bool(correct[i])
            fp += not correct[i]
            i += 1
        precision = tp / (tp + fp)
        # tp + fn, with fn = all not-accepted; zero only when nothing correct exists
        denom = total - fp
        recall = tp / denom if denom else 0.0
        points.append(PrPoint(float(threshold), float(precision), float(recall)))
    return PrCurve(points=tuple(points), max_recall=points[-1].recall)


def auc_aoc(curve: PrCurve, recall_cap: float = 1.0) -> tuple[float, float]:
    """Trapezoidal area under (and over) precision across [0, cap recall]."""
    if recall_cap <= 0:
        raise RangeError(f"recall cap must be positive, got {recall_cap}")
    span = min(curve.max_recall, recall_cap)
    if span <= 0 or not curve.points:
        return 0.0, 0.0
    pts = curve.points
    auc = pts[0].precision * min(pts[0].recall, span)
    prev = pts[0]
    for pt in pts[1:]:
        if prev.recall >= span:
            break
        r1 = min(pt.recall, span)
        if r1 <= prev.recall:
            prev = pt if pt.recall <= span else prev
            continue
        if pt.recall <= span:
            p1 = pt.precision
        else:  # cut the segment at the cap
            frac = (span - prev.recall) / (pt.recall - prev.recall)
            p1 = prev.precision + frac * (pt.precision - prev.precision)
        auc += (r1 - prev.recall) * (prev.precision + p1) / 2.0
        prev = PrPoint(pt.threshold, p1, r1)
    return auc, span - auc


def evaluate_entries(
    entries: list[MatchEntry], gt: GroundTruth, recall_cap: float | None = None
) -> EvalReport:
    """Full report for one proposal set, integrated to ``recall_cap``.

    With no cap the system's own max recall is used, which is the standard
    operating range for a filtered system.
    """
    curve = pr_curve(entries, gt)
    cap = curve.max_recall if recall_cap is None else min(recall_cap, 1.0)
    auc, aoc = auc_aoc(curve, cap) if cap > 0 else (0.0, 0.0)
    precision = recall = f1 = 0.0
    if curve.points:
        # operating point: the last swept point not beyond the cap
        at = curve.points[0]
        for pt in curve.points:
            if pt.recall > cap and pt is not curve.points[0]:
                break
            at = pt
        precision, recall = at.precision, at.recall
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return EvalReport(
        recall_cap=cap,
        max_recall=curve.max_recall,
        auc=auc,
        aoc=aoc,
        precision_at_cap=precision,
        recall_at_cap=recall,
        f1_at_cap=f1,
    )


def evaluate_pair(
    baseline_entries: list[MatchEntry],
    filtered_entries: list[MatchEntry],
    gt: GroundTruth,
) -> tuple[EvalReport, EvalReport, ReductionRow]:
    """Score two systems over the filtered system's operating range."""
    cap = pr_curve(filtered_entries, gt).max_recall
    base = evaluate_entries(baseline_entries, gt, recall_cap=cap)
    filt = evaluate_entries(filtered_entries, gt, recall_cap=cap)
    return base, filt, compare_reports(base, filt)


def compare_reports(baseline: EvalReport, filtered: EvalReport) -> ReductionRow:
    """Percentage drop in AOC; positive means the filter helped.

    A zero-AOC baseline reports 0.00 (already perfect; nothing to reduce).
    """
    if baseline.aoc == 0.0:
        reduction = 0.0
    else:
        reduction = 100.0 * (baseline.aoc - filtered.aoc) / baseline.aoc
    return ReductionRow(
        baseline_aoc=baseline.aoc,
        filtered_aoc=filtered.aoc,
        reduction_percent=reduction,
    )


def write_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(vars(report), sort_keys=True, indent=2) + "\n")


def read_report(path: str | Path) -> EvalReport:
    try:
        doc = json.loads(Path(path).read_text())
        return EvalReport(**doc)
    except (OSError, json.JSONDecodeError, TypeError) as e:
        raise FormatError(f"cannot read report {path}: {e}") from e


def write_pr_csv(curve: PrCurve, path: str | Path) -> None:
    lines = ["threshold,precision,recall"]
    lines += [f"{p.threshold!r},{p.precision!r},{p.recall!r}" for p in curve.points]
    Path(path).write_text("\n".join(lines) + "\n")


def report_table(rows: list[tuple[str, EvalReport]]) -> str:
    """Fixed-width human-readable table, reductions rounded to 2 decimals."""
    header = f"{'system':<24} {'max_recall':>10} {'auc':>8} {'aoc':>8} {'precision':>9} {'f1':>6}"
    lines = [header, "-" * len(header)]
    for name, rep in rows:
        lines.append(
            f"{name:<24} {rep.max_recall:>10.4f} {rep.auc:>8.4f} {rep.aoc:>8.4f} "
            f"{rep.precision_at_cap:>9.4f} {rep.f1_at_cap:>6.4f}"
        )
    if len(rows) == 2:
        reduction = compare_reports(rows[0][1], rows[1][1])
        lines.append(f"AOC reduction: {reduction.reduction_percent:.2f}%")
    return "\n".join(lines)
