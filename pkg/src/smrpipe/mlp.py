"""From-scratch four-class MLP with Adam, plus SMOTE and k-fold evaluation.

The default architecture is three ReLU hidden layers of 128 units and a
softmax output, trained on cross-entropy plus an L2 penalty
(``l2_alpha * sum(W**2)``, biases excluded). Training is full-batch by
default and fully deterministic under a fixed seed: identical seed and data
give bit-identical weights.

SMOTE balancing and stratified k-fold live here too because they are part
of the training protocol: oversampling is applied inside each training fold
only, never to validation data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .attributes import AttributeVector
from .errors import DataError, FormatError, NumericsError
from .labeling import OutcomeLabel

NUM_CLASSES = 4
HIDDEN_DIMS = (128, 128, 128)
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    l2_alpha: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int | None = None  # None = full batch
    max_epochs: int = 500
    patience: int = 20  # early stop after this many epochs without progress
    min_delta: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        positive = {
            "learning_rate": self.learning_rate,
            "l2_alpha": self.l2_alpha,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
        }
        for name, value in positive.items():
            if value <= 0:
                raise DataError(f"{name} must be positive, got {value}")


@dataclass
class MlpModel:
    """Weights and biases per layer; hidden ReLU, softmax output."""

    layer_dims: list[int]
    weights: list[np.ndarray]  # weights[l]: (layer_dims[l], layer_dims[l+1])
    biases: list[np.ndarray]
    trained_on: str = ""
    loss_curve: list[float] = field(default_factory=list)

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Class probabilities for a batch of inputs, shape (N, 4)."""
        h = np.atleast_2d(np.asarray(X, dtype=np.float64))
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ W + b, 0.0)
        logits = h @ self.weights[-1] + self.biases[-1]
        return _softmax(logits)


@dataclass(frozen=True)
class PredictionScores:
    """Per-query class probabilities and the derived filter scores."""

    query_index: int
    probs: np.ndarray  # shape (4,)
    predicted_class: int

    @property
    def removal_score(self) -> float:
        """Confidence the match is incorrect after sequence matching."""
        return float(self.probs[1] + self.probs[3])

    @property
    def keep_confidence(self) -> float:
        """Confidence the match is correct after sequence matching."""
        return float(self.probs[0] + self.probs[2])


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def init_model(input_dim: int, seed: int, trained_on: str = "") -> MlpModel:
    """He-style uniform init, scaled by fan-in; biases start at zero."""
    dims = [input_dim, *HIDDEN_DIMS, NUM_CLASSES]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims=dims, weights=weights, biases=biases, trained_on=trained_on)


def loss_and_gradients(
    model: MlpModel, X: np.ndarray, y: np.ndarray, l2_alpha: float
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean cross-entropy + l2_alpha * sum(W^2), with analytic gradients."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n = X.shape[0]
    # forward, keeping pre-activations for backprop
    activations = [X]
    h = X
    for W, b in zip(model.weights[:-1], model.biases[:-1]):
        h = np.maximum(h @ W + b, 0.0)
        activations.append(h)
    probs = _softmax(h @ model.weights[-1] + model.biases[-1])

    eps = np.finfo(np.float64).tiny
    ce = -np.mean(np.log(probs[np.arange(n), y] + eps))
    loss = ce + l2_alpha * sum(float((W**2).sum()) for W in model.weights)

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads_w = [np.empty(0)] * len(model.weights)
    grads_b = [np.empty(0)] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        grads_w[l] = activations[l].T @ delta + 2.0 * l2_alpha * model.weights[l]
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (activations[l] > 0)
    return loss, grads_w, grads_b


def train(X: np.ndarray, y: np.ndarray, cfg: TrainConfig, trained_on: str = "") -> MlpModel:
    """Fit the classifier; deterministic for a fixed config seed."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise DataError("empty training set")
    if not np.isfinite(X).all():
        raise DataError("training inputs must be finite")

    model = init_model(X.shape[1], seed=cfg.seed, trained_on=trained_on)
    params = model.weights + model.biases
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    rng = np.random.default_rng(cfg.seed + 1)

    best = np.inf
    stall = 0
    step = 0
    for epoch in range(cfg.max_epochs):
        if cfg.batch_size is None:
            batches = [(X, y)]
        else:
            order = rng.permutation(X.shape[0])
            batches = [
                (X[order[i : i + cfg.batch_size]], y[order[i : i + cfg.batch_size]])
                for i in range(0, X.shape[0], cfg.batch_size)
            ]
        for bx, by in batches:
            _, grads_w, grads_b = loss_and_gradients(model, bx, by, cfg.l2_alpha)
            grads = grads_w + grads_b
            step += 1
            for p, g, mi, vi in zip(params, grads, m, v):
                mi *= cfg.adam_beta1
                mi += (1 - cfg.adam_beta1) * g
                vi *= cfg.adam_beta2
                vi += (1 - cfg.adam_beta2) * g * g
                m_hat = mi / (1 - cfg.adam_beta1**step)
                v_hat = vi / (1 - cfg.adam_beta2**step)
                p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)

        loss, _, _ = loss_and_gradients(model, X, y, cfg.l2_alpha)
        if not np.isfinite(loss):
            raise NumericsError(f"training loss became non-finite at epoch {epoch}")
        model.loss_curve.append(float(loss))
        if loss < best - cfg.min_delta:
            best = loss
            stall = 0
        else:
            stall += 1
            if stall >= cfg.patience:
                break
    return model


def predict(
    model: MlpModel, attrs: AttributeVector | np.ndarray, query_index: int | None = None
) -> PredictionScores:
    """Forward one attribute vector through the model."""
    if isinstance(attrs, AttributeVector):
        x = attrs.as_array()
        if query_index is None:
            query_index = attrs.query_index
    else:
        x = np.asarray(attrs, dtype=np.float64)
    probs = model.forward(x)[0]
    return PredictionScores(
        query_index=-1 if query_index is None else query_index,
        probs=probs,
        predicted_class=int(np.argmax(probs)),
    )


# ---------------------------------------------------------------------------
# SMOTE oversampling
# ---------------------------------------------------------------------------


def smote_oversample(
    X: np.ndarray, y: np.ndarray, neighbors: int = 5, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Balance every class up to the majority count with synthetic samples.

    Each synthetic point is x + u * (x_nn - x) with u ~ Uniform(0, 1) and
    x_nn one of the k nearest same-class neighbors (Euclidean), so it always
    lies on a segment between two real points of its class. Originals are
    returned unchanged, in order, with synthetics appended; classes are
    processed in ascending label order, so output is deterministic per seed.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    labels, counts = np.unique(y, return_counts=True)
    majority = int(counts.max())
    for label, count in zip(labels, counts):
        if count < 2:
            raise DataError(
                f"class {label} has {count} sample(s); need >= 2 to interpolate"
            )
    rng = np.random.default_rng(seed)
    new_x, new_y = [X], [y]
    for label, count in zip(labels, counts):
        need = majority - int(count)
        if need == 0:
            continue
        pts = X[y == label]
        k = min(neighbors, len(pts) - 1)
        dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        nn = np.argsort(dists, axis=1, kind="stable")[:, 1 : k + 1]
        synth = np.empty((need, X.shape[1]))
        for t in range(need):
            base = t % len(pts)
            pick = nn[base, rng.integers(k)]
            u = rng.random()
            synth[t] = pts[base] + u * (pts[pick] - pts[base])
        new_x.append(synth)
        new_y.append(np.full(need, label, dtype=np.int64))
    return np.vstack(new_x), np.concatenate(new_y)


def build_training_set(
    attrs: list[AttributeVector], labels: list[OutcomeLabel]
) -> tuple[np.ndarray, np.ndarray]:
    """Join rank-0 attribute vectors with outcome labels by query index."""
    by_query = {a.query_index: a for a in attrs if a.rank == 0}
    X, y = [], []
    for label in labels:
        a = by_query.get(label.query_index)
        if a is None:
            raise DataError(f"no rank-0 attributes for labeled query {label.query_index}")
        X.append(a.as_array())
        y.append(label.y)
    if not X:
        raise DataError("no overlapping queries between attributes and labels")
    return np.vstack(X), np.array(y, dtype=np.int64)


# ---------------------------------------------------------------------------
# Evaluation protocol
# ---------------------------------------------------------------------------


def macro_f1(y_true: np.ndarray, y_pred: np.ndarray, num_classes: int = NUM_CLASSES) -> float:
    """Unweighted mean of per-class F1 over all four classes.

    A class with no true and no predicted samples scores 0, so degenerate
    folds are penalized rather than skipped.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    scores = []
    for c in range(num_classes):
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


def stratified_kfold_f1(
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig,
    folds: int = 5,
    smote_neighbors: int = 5,
) -> tuple[list[float], float]:
    """Macro F1 per stratified fold and the mean across folds.

    SMOTE runs inside each training fold only; validation folds are left as
    observed so scores are not inflated by synthetic points.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    if folds < 2:
        raise DataError(f"need at least 2 folds, got {folds}")
    _, counts = np.unique(y, return_counts=True)
    if counts.min() < folds:
        raise DataError(
            f"smallest class has {counts.min()} samples, fewer than {folds} folds"
        )
    splitter = StratifiedKFold(n_splits=folds, shuffle=False)
    fold_scores = []
    for train_idx, val_idx in splitter.split(X, y):
        bx, by = smote_oversample(X[train_idx], y[train_idx], smote_neighbors, cfg.seed)
        model = train(bx, by, cfg)
        preds = np.argmax(model.forward(X[val_idx]), axis=1)
        fold_scores.append(macro_f1(y[val_idx], preds))
    return fold_scores, float(np.mean(fold_scores))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def save_model(model: MlpModel, path: str | Path, train_config: TrainConfig | None = None) -> None:
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "layerDims": model.layer_dims,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "trainConfig": None if train_config is None else vars(train_config),
        "trainedOn": model.trained_on,
        "lossCurve": model.loss_curve,
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def load_model(path: str | Path) -> MlpModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise FormatError(f"cannot read model {path}: {e}") from e
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise FormatError(f"unsupported model version {doc.get('version')!r}")
    model = MlpModel(
        layer_dims=list(doc["layerDims"]),
        weights=[np.array(w) for w in doc["weights"]],
        biases=[np.array(b) for b in doc["biases"]],
        trained_on=doc.get("trainedOn", ""),
        loss_curve=list(doc.get("lossCurve", [])),
    )
    for l, (fan_in, fan_out) in enumerate(zip(model.layer_dims[:-1], model.layer_dims[1:])):
        if model.weights[l].shape != (fan_in, fan_out) or model.biases[l].shape != (fan_out,):
            raise FormatError(f"layer {l} weight shapes inconsistent with layerDims")
    return model
