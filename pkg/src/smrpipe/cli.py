"""Staged command-line pipeline.

Each subcommand reads the previous stage's files and writes its own plus a
``.manifest.json`` recording the tool version, the resolved configuration,
and the SHA-256 of every input, so a run can be reproduced byte for byte.

Configuration precedence: built-in defaults < ``--config`` key=value file
< SMR_SEED environment variable (seed only) < explicit flags.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .attributes import AttributeVector, SmoothingParams
from .errors import DataError, FormatError, SmrError
from .evaluation import (
    compare_reports,
    entries_from_decisions,
    entries_from_matches,
    evaluate_entries,
    pr_curve,
    read_report,
    report_table,
    write_pr_csv,
    write_report,
)
from .filters import FilterConfig, MatchDecision, remove_matches, restore_matches
from .labeling import label_queries
from .matrixio import (
    load_ground_truth,
    load_matrix,
    save_ground_truth,
    save_matrix,
)
from .mlp import (
    PredictionScores,
    TrainConfig,
    load_model,
    save_model,
    smote_oversample,
    train,
)
from .pipeline import attribute_table, run_battery_experiment
from .seqmatch import best_matches, seq_from_matrix, sequence_match
from .synth import AliasBand, Burst, ScenarioSpec, generate, scenario_battery


@dataclass
class RunConfig:
    seq_len: int = 4
    rank_depth: int = 3
    w: int = 2
    epsilon: float = 1e-9
    tolerance: int = 2
    trust_threshold: float = 0.5
    restoration_threshold: float = 0.91
    restoration_depth: int = 3
    folds: int = 5
    learning_rate: float = 1e-4
    l2_alpha: float = 1e-3
    batch_size: int = 0  # 0 = full batch
    max_epochs: int = 500
    patience: int = 20
    smote_neighbors: int = 5
    seed: int = 0

    def smoothing(self) -> SmoothingParams:
        return SmoothingParams(w=self.w, epsilon=self.epsilon)

    def filtering(self) -> FilterConfig:
        return FilterConfig(
            trust_threshold=self.trust_threshold,
            restoration_depth=self.restoration_depth,
            restoration_threshold=self.restoration_threshold,
        )

    def training(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            l2_alpha=self.l2_alpha,
            batch_size=self.batch_size or None,
            max_epochs=self.max_epochs,
            patience=self.patience,
            seed=self.seed,
        )


def parse_config_file(path: Path) -> dict:
    """Flat key=value text; blank lines and # comments ignored."""
    values = {}
    known = {f.name: f.type for f in fields(RunConfig)}
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f"cannot read config {path}: {e}") from e
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise FormatError(f"{path}:{n}: unknown config key {key!r}")
        caster = float if known[key] == "float" else int
        try:
            values[key] = caster(value)
        except ValueError as e:
            raise FormatError(f"{path}:{n}: bad value for {key}: {value!r}") from e
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **parse_config_file(Path(args.config)))
    if "SMR_SEED" in os.environ:
        cfg = replace(cfg, seed=int(os.environ["SMR_SEED"]))
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    return replace(cfg, **overrides)


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(anchor: Path, command: str, cfg: RunConfig, inputs, outputs) -> None:
    doc = {
        "tool": "smrpipe",
        "version": __version__,
        "command": command,
        "config": vars(cfg),
        "inputs": {str(p): sha256_of(Path(p)) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    path = anchor.with_name(anchor.name + ".manifest.json")
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Intermediate file formats
# ---------------------------------------------------------------------------


def write_attrs_csv(
    path: Path, table: dict[int, list[AttributeVector]], labels: dict[int, int] | None = None
) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        header = ["query", "rank", "a1", "a2", "a3", "a4"]
        if labels is not None:
            header.append("label")
        out.writerow(header)
        for j in sorted(table):
            for vec in table[j]:
                row = [j, vec.rank, repr(vec.a1), repr(vec.a2), repr(vec.a3), repr(vec.a4)]
                if labels is not None:
                    row.append(labels.get(j, ""))
                out.writerow(row)


def read_attrs_csv(path: Path) -> dict[int, list[AttributeVector]]:
    table: dict[int, list[AttributeVector]] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            vec = AttributeVector(
                query_index=int(row["query"]),
                rank=int(row["rank"]),
                a1=float(row["a1"]),
                a2=float(row["a2"]),
                a3=float(row["a3"]),
                a4=float(row["a4"]),
            )
            table.setdefault(vec.query_index, []).append(vec)
    for vecs in table.values():
        vecs.sort(key=lambda v: v.rank)
    if not table:
        raise FormatError(f"{path}: no attribute rows")
    return table


def write_labels_csv(path: Path, labels) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["query", "label"])
        for lab in labels:
            out.writerow([lab.query_index, lab.y])


def read_labels_csv(path: Path) -> dict[int, int]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        labels = {int(row["query"]): int(row["label"]) for row in reader}
    if not labels:
        raise FormatError(f"{path}: no label rows")
    return labels


def write_preds_csv(path: Path, preds: dict[int, PredictionScores]) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["query", "p0", "p1", "p2", "p3", "predicted", "removal_score"])
        for j in sorted(preds):
            p = preds[j]
            out.writerow(
                [j, *(repr(float(v)) for v in p.probs), p.predicted_class, repr(p.removal_score)]
            )


def read_preds_csv(path: Path) -> dict[int, PredictionScores]:
    preds = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            probs = np.array([float(row[k]) for k in ("p0", "p1", "p2", "p3")])
            j = int(row["query"])
            preds[j] = PredictionScores(
                query_index=j, probs=probs, predicted_class=int(row["predicted"])
            )
    if not preds:
        raise FormatError(f"{path}: no prediction rows")
    return preds


def write_decisions_csv(path: Path, decisions) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["query", "original_ref", "verdict", "final_ref", "removal_score"])
        for d in decisions:
            final = "" if d.final_ref is None else d.final_ref
            out.writerow([d.query_index, d.original_ref, d.verdict, final, repr(d.removal_score)])


def read_decisions_csv(path: Path) -> list[MatchDecision]:
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            out.append(
                MatchDecision(
                    query_index=int(row["query"]),
                    original_ref=int(row["original_ref"]),
                    verdict=row["verdict"],
                    final_ref=int(row["final_ref"]) if row["final_ref"] else None,
                    removal_score=float(row["removal_score"]),
                )
            )
    if not out:
        raise FormatError(f"{path}: no decision rows")
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.scenario:
        spec = _scenario_from_json(Path(args.scenario), cfg.seed)
        scenarios = [(spec.name or "scenario", *generate(spec))]
    else:
        scenarios = [
            (sc.name, sc.matrix, sc.gt)
            for sc in scenario_battery(cfg.seed, size=args.size)
        ]
    entries = []
    outputs = []
    for name, matrix, gt in scenarios:
        matrix_path = out_dir / f"{name}.smrm"
        gt_path = out_dir / f"{name}.gt.csv"
        save_matrix(matrix, matrix_path)
        save_ground_truth(gt, gt_path)
        entries.append({"name": name, "matrix": matrix_path.name, "ground_truth": gt_path.name})
        outputs += [matrix_path, gt_path]
        print(f"wrote {matrix_path} ({matrix.rows}x{matrix.cols})")
    battery_path = out_dir / "battery.json"
    battery_path.write_text(json.dumps({"seed": cfg.seed, "scenarios": entries}, indent=2) + "\n")
    write_manifest(battery_path, "gen", cfg, [], outputs + [battery_path])
    return 0


def _scenario_from_json(path: Path, seed: int) -> ScenarioSpec:
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise FormatError(f"cannot read scenario {path}: {e}") from e
    return ScenarioSpec(
        size=doc["size"],
        noise_sigma=doc.get("noise_sigma", 0.0),
        alias_bands=tuple(AliasBand(**band) for band in doc.get("alias_bands", [])),
        bursts=tuple(Burst(**burst) for burst in doc.get("bursts", [])),
        seed=doc.get("seed", seed),
        name=doc.get("name", path.stem),
        tolerance=doc.get("tolerance", 2),
    )


def cmd_seqmatch(args, cfg: RunConfig) -> int:
    D = load_matrix(args.matrix)
    out = sequence_match(D, cfg.seq_len)
    save_matrix(out, args.out)
    write_manifest(Path(args.out), "seqmatch", cfg, [args.matrix], [args.out])
    print(f"wrote {args.out} (L={cfg.seq_len}, valid from query {out.valid_from})")
    return 0


def cmd_attrs(args, cfg: RunConfig) -> int:
    D = load_matrix(args.matrix)
    depth = max(cfg.rank_depth, cfg.restoration_depth + 1 if args.for_restoration else 1)
    table = attribute_table(D, cfg.seq_len, depth, cfg.smoothing())
    labels = read_labels_csv(Path(args.labels)) if args.labels else None
    write_attrs_csv(Path(args.out), table, labels=labels)
    inputs = [args.matrix] + ([args.labels] if args.labels else [])
    outputs = [args.out]
    if args.binary_out:
        from .attributes import save_attribute_records

        flat = [vec for j in sorted(table) for vec in table[j]]
        save_attribute_records(flat, args.binary_out, labels=labels)
        outputs.append(args.binary_out)
    write_manifest(Path(args.out), "attrs", cfg, inputs, outputs)
    print(f"wrote {args.out} ({len(table)} queries x {depth} ranks)")
    return 0


def cmd_label(args, cfg: RunConfig) -> int:
    D = load_matrix(args.matrix)
    Dseq = seq_from_matrix(load_matrix(args.seq_matrix))
    gt = load_ground_truth(args.gt, tolerance=cfg.tolerance)
    labels = label_queries(D, Dseq, gt)
    write_labels_csv(Path(args.out), labels)
    write_manifest(Path(args.out), "label", cfg, [args.matrix, args.seq_matrix, args.gt], [args.out])
    counts = {c: sum(1 for lab in labels if lab.y == c) for c in range(4)}
    print(f"wrote {args.out} (classes {counts})")
    return 0


def cmd_train(args, cfg: RunConfig) -> int:
    tables = [read_attrs_csv(Path(p)) for p in args.attrs]
    label_maps = [read_labels_csv(Path(p)) for p in args.labels]
    if len(tables) != len(label_maps):
        raise DataError("need one labels file per attrs file")
    X, y = [], []
    for table, labels in zip(tables, label_maps):
        for j, cls in sorted(labels.items()):
            if j not in table:
                raise DataError(f"labeled query {j} has no attributes")
            X.append(table[j][0].as_array())
            y.append(cls)
    X = np.vstack(X)
    y = np.array(y, dtype=np.int64)
    if args.kfold:
        from .mlp import stratified_kfold_f1

        per_fold, mean = stratified_kfold_f1(
            X, y, cfg.training(), folds=cfg.folds, smote_neighbors=cfg.smote_neighbors
        )
        folds_text = ", ".join(f"{v:.3f}" for v in per_fold)
        print(f"stratified {cfg.folds}-fold macro F1: [{folds_text}] mean {mean:.3f}")
    bx, by = smote_oversample(X, y, neighbors=cfg.smote_neighbors, seed=cfg.seed)
    model = train(bx, by, cfg.training(), trained_on=",".join(str(p) for p in args.attrs))
    save_model(model, args.out, train_config=cfg.training())
    write_manifest(Path(args.out), "train", cfg, list(args.attrs) + list(args.labels), [args.out])
    print(f"wrote {args.out} ({len(by)} balanced rows, final loss {model.loss_curve[-1]:.4f})")
    return 0


def cmd_predict(args, cfg: RunConfig) -> int:
    model = load_model(args.model)
    table = read_attrs_csv(Path(args.attrs))
    from .pipeline import predictions_for

    preds = predictions_for(model, table)
    write_preds_csv(Path(args.out), preds)
    write_manifest(Path(args.out), "predict", cfg, [args.model, args.attrs], [args.out])
    print(f"wrote {args.out} ({len(preds)} queries)")
    return 0


def cmd_filter(args, cfg: RunConfig) -> int:
    Dseq = seq_from_matrix(load_matrix(args.seq_matrix))
    preds = read_preds_csv(Path(args.preds))
    fcfg = cfg.filtering()
    depth = fcfg.restoration_depth + 1 if args.restore else 1
    matches = best_matches(Dseq, depth)
    decisions = remove_matches(matches, preds, fcfg, valid_from=Dseq.valid_from)
    inputs = [args.seq_matrix, args.preds]
    if args.restore:
        if not (args.model and args.attrs):
            raise DataError("--restore needs --model and --attrs")
        model = load_model(args.model)
        table = read_attrs_csv(Path(args.attrs))
        decisions = restore_matches(decisions, matches, table, model, fcfg)
        inputs += [args.model, args.attrs]
    write_decisions_csv(Path(args.out), decisions)
    write_manifest(Path(args.out), "filter", cfg, inputs, [args.out])
    counts = {}
    for d in decisions:
        counts[d.verdict] = counts.get(d.verdict, 0) + 1
    print(f"wrote {args.out} ({counts})")
    return 0


def cmd_eval(args, cfg: RunConfig) -> int:
    if args.baseline or args.filtered:
        if not (args.baseline and args.filtered):
            raise DataError("comparison mode needs both --baseline and --filtered")
        row = compare_reports(read_report(args.baseline), read_report(args.filtered))
        print(
            f"baseline_aoc={row.baseline_aoc:.4f} filtered_aoc={row.filtered_aoc:.4f} "
            f"reduction={row.reduction_percent:.2f}%"
        )
        if args.out:
            Path(args.out).write_text(json.dumps(vars(row), sort_keys=True, indent=2) + "\n")
            write_manifest(Path(args.out), "eval", cfg, [args.baseline, args.filtered], [args.out])
        return 0

    if not (args.seq_matrix and args.gt):
        raise DataError("evaluation mode needs --seq-matrix and --gt")
    Dseq = seq_from_matrix(load_matrix(args.seq_matrix))
    gt = load_ground_truth(args.gt, tolerance=cfg.tolerance)
    inputs = [args.seq_matrix, args.gt]
    if args.decisions:
        decisions = read_decisions_csv(Path(args.decisions))
        matches = best_matches(Dseq, cfg.restoration_depth + 1)
        entries = entries_from_decisions(decisions, matches, valid_from=Dseq.valid_from)
        inputs.append(args.decisions)
    else:
        matches = best_matches(Dseq, 1)
        entries = entries_from_matches(matches, valid_from=Dseq.valid_from)
    report = evaluate_entries(entries, gt)
    write_report(report, args.out)
    outputs = [args.out]
    curve = pr_curve(entries, gt)
    if args.pr_csv:
        write_pr_csv(curve, args.pr_csv)
        outputs.append(args.pr_csv)
    if args.pr_svg:
        from .plots import save_pr_curves

        save_pr_curves({"system": curve}, args.pr_svg)
        outputs.append(args.pr_svg)
    write_manifest(Path(args.out), "eval", cfg, inputs, outputs)
    name = "filtered" if args.decisions else "sequence-matched"
    print(report_table([(name, report)]))
    print(f"wrote {args.out}")
    return 0


def cmd_ablate(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seq_lens = [int(v) for v in args.L.split(",")] if args.L else [2, 4, 6, 8, 10]
    taus = [float(v) for v in args.tau_sweep.split(",")] if args.tau_sweep else [cfg.trust_threshold]
    scenarios = scenario_battery(cfg.seed, size=args.size)
    params = cfg.smoothing()
    rows = []
    tau_curves: dict[str, dict[str, object]] = {}
    for L in seq_lens:
        for tau in taus:
            fcfg = replace(cfg.filtering(), trust_threshold=tau)
            exp = run_battery_experiment(
                scenarios, L, cfg.training(), fcfg, params, restore=args.restore
            )
            for res in exp.results:
                rows.append(
                    {
                        "L": L,
                        "tau": tau,
                        "scenario": res.name,
                        "baseline_auc": res.baseline.auc,
                        "filtered_auc": res.filtered.auc,
                        "baseline_aoc": res.baseline.aoc,
                        "filtered_aoc": res.filtered.aoc,
                        "reduction_percent": res.reduction.reduction_percent,
                    }
                )
                if len(taus) > 1 and L == seq_lens[0]:
                    gt = next(sc.gt for sc in scenarios if sc.name == res.name)
                    entries = entries_from_decisions(res.decisions, res.matches)
                    tau_curves.setdefault(res.name, {})[f"tau={tau:.2f}"] = pr_curve(entries, gt)
            print(
                f"L={L} tau={tau:.2f} predictor_f1={exp.predictor_f1:.3f} "
                f"mean_reduction={exp.mean_reduction:.2f}% "
                f"improved={exp.improved_fraction:.0%}"
            )

    table_path = out_dir / "ablation_table.csv"
    with open(table_path, "w", newline="") as f:
        out = csv.DictWriter(f, fieldnames=list(rows[0]))
        out.writeheader()
        out.writerows(rows)

    summary = {}
    for L in seq_lens:
        at_l = [r for r in rows if r["L"] == L and r["tau"] == taus[0]]
        summary[str(L)] = {
            "mean_baseline_auc": float(np.mean([r["baseline_auc"] for r in at_l])),
            "mean_filtered_auc": float(np.mean([r["filtered_auc"] for r in at_l])),
            "mean_reduction_percent": float(np.mean([r["reduction_percent"] for r in at_l])),
        }
    summary_path = out_dir / "ablation_summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")

    from .plots import save_auc_bars, save_pr_curves

    bars = [
        (f"L={L}", summary[str(L)]["mean_baseline_auc"], summary[str(L)]["mean_filtered_auc"])
        for L in seq_lens
    ]
    svg_path = out_dir / "pr_auc_by_seqlen.svg"
    save_auc_bars(bars, svg_path, title="PR AUC: sequence matching vs + predictor")
    outputs = [table_path, summary_path, svg_path]
    for name, curves in tau_curves.items():
        tau_svg = out_dir / f"pr_tau_{name}.svg"
        save_pr_curves(curves, tau_svg, title=f"{name}: trust-threshold sweep (L={seq_lens[0]})")
        outputs.append(tau_svg)
    write_manifest(summary_path, "ablate", cfg, [], outputs)
    print("wrote " + ", ".join(str(p) for p in outputs))
    return 0


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser, l_alias: bool = True) -> None:
    p.add_argument("--config", help="flat key=value config file")
    seq_len_flags = ("--seq-len", "--L") if l_alias else ("--seq-len",)
    p.add_argument(*seq_len_flags, dest="seq_len", type=int)
    p.add_argument("--rank-depth", "--K", dest="rank_depth", type=int)
    p.add_argument("--w", "--W", dest="w", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tolerance", type=int)
    p.add_argument("--trust-threshold", "--tau", dest="trust_threshold", type=float)
    p.add_argument("--restoration-threshold", "--rho", dest="restoration_threshold", type=float)
    p.add_argument("--restoration-depth", dest="restoration_depth", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--learning-rate", "--lr", dest="learning_rate", type=float)
    p.add_argument("--l2-alpha", dest="l2_alpha", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--max-epochs", "--epochs", dest="max_epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--smote-neighbors", dest="smote_neighbors", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smrpipe",
        description="Sequence-matching receptiveness pipeline (staged, file-composed)",
    )
    parser.add_argument("--version", action="version", version=f"smrpipe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic scenarios")
    p.add_argument("--battery", action="store_true", help="emit the full scenario battery")
    p.add_argument("--scenario", help="JSON scenario spec for a single matrix")
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("seqmatch", help="apply sequence matching to a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_seqmatch)

    p = sub.add_parser("attrs", help="extract per-query attributes")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--for-restoration", action="store_true",
                   help="emit enough ranks for the restoration filter")
    p.add_argument("--labels", help="labels CSV to merge in as a label column")
    p.add_argument("--binary-out", help="also write a binary attribute record stream")
    _add_config_flags(p)
    p.set_defaults(func=cmd_attrs)

    p = sub.add_parser("label", help="label query outcomes against ground truth")
    p.add_argument("--matrix", required=True)
    p.add_argument("--seq-matrix", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="train the outcome classifier")
    p.add_argument("--attrs", nargs="+", required=True)
    p.add_argument("--labels", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kfold", action="store_true",
                   help="report stratified k-fold macro F1 before training")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score queries with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("filter", help="remove (and optionally restore) matches")
    p.add_argument("--seq-matrix", required=True)
    p.add_argument("--preds", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--restore", action="store_true")
    p.add_argument("--model")
    p.add_argument("--attrs")
    _add_config_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("eval", help="evaluate a system or compare two reports")
    p.add_argument("--seq-matrix")
    p.add_argument("--gt")
    p.add_argument("--decisions")
    p.add_argument("--baseline")
    p.add_argument("--filtered")
    p.add_argument("--out")
    p.add_argument("--pr-csv")
    p.add_argument("--pr-svg")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="sweep sequence lengths and trust thresholds")
    p.add_argument("--L", dest="L", help="comma-separated sequence lengths (default 2,4,6,8,10)")
    p.add_argument("--tau-sweep", help="comma-separated trust thresholds")
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--restore", action="store_true")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p, l_alias=False)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except SmrError as e:
        print(f"error:{e.category}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
