"""Pre-contact routing model: threshold labels from teacher scores, learned
categorical embeddings, a binary boosted classifier, and precision/recall.

Embeddings come from a single-hidden-layer predictor: each categorical level
owns a dense vector, the vectors concatenate with standardized numerics, and
a linear layer with logistic output is trained by per-sample SGD on
cross-entropy. The learned level vectors then feed the boosted trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gbdt
from .errors import SchemaError

DEFAULT_LABEL_THRESHOLD = 0.8
DEFAULT_DECISION_THRESHOLD = 0.5
UNSEEN_LEVEL = "__unseen__"


def make_labels(scores, threshold: float = DEFAULT_LABEL_THRESHOLD) -> np.ndarray:
    """1 where the complexity score is at or above the threshold, else 0."""
    scores = np.asarray(scores, dtype=np.float64)
    return (scores >= threshold).astype(np.int64)


def embedding_dims(cardinalities) -> list[int]:
    return [min(16, math.ceil(k / 2)) for k in cardinalities]


@dataclass
class EmbeddingTable:
    """Per-feature level vectors plus the numeric standardization state.

    Each feature's matrix has one extra trailing row: the fallback vector for
    levels unseen at fit time.
    """

    levels: list[dict[str, int]]
    vectors: list[np.ndarray]
    cardinalities: list[int]
    numeric_mean: np.ndarray
    numeric_std: np.ndarray
    train_log_loss: list[float] = field(default_factory=list, repr=False)

    @property
    def dims(self) -> list[int]:
        return [v.shape[1] for v in self.vectors]

    @property
    def width(self) -> int:
        return self.numeric_mean.shape[0] + sum(self.dims)


def _records_arrays(records):
    numeric = np.array([r.numeric_features for r in records], dtype=np.float64)
    categorical = [list(r.categorical_features) for r in records]
    return numeric, categorical


def _standardize_fit(numeric: np.ndarray):
    mean = numeric.mean(axis=0)
    std = numeric.std(axis=0)
    return mean, std


def _standardize_apply(numeric, mean, std):
    inv = np.where(std > 0, 1.0 / np.where(std > 0, std, 1.0), 0.0)
    return (numeric - mean) * inv


def _level_index(categorical, n_features: int) -> list[dict[str, int]]:
    levels: list[dict[str, int]] = []
    for f in range(n_features):
        seen = sorted({row[f] for row in categorical})
        levels.append({lvl: i for i, lvl in enumerate(seen)})
    return levels


def _cat_codes(categorical, levels) -> np.ndarray:
    """Integer codes per (row, feature); unseen levels get the fallback row."""
    n = len(categorical)
    codes = np.empty((n, len(levels)), dtype=np.int64)
    for f, table in enumerate(levels):
        fallback = len(table)
        for i in range(n):
            codes[i, f] = table.get(categorical[i][f], fallback)
    return codes


def _forward_batch(embeddings, w, b, x_num, codes):
    """Logits and the embedded design rows for a batch."""
    parts = [x_num]
    for f, emb in enumerate(embeddings):
        parts.append(emb[codes[:, f]])
    x = np.hstack(parts)
    return x @ w + b, x


def _loss_and_grads(embeddings, w, b, x_num, codes, y):
    """Full-batch mean cross-entropy loss and analytic gradients.

    Shared by the SGD loop (per-sample batches) and the finite-difference
    gradient check.
    """
    n = x_num.shape[0]
    logits, x = _forward_batch(embeddings, w, b, x_num, codes)
    p = 1.0 / (1.0 + np.exp(-logits))
    eps = 1e-15
    loss = float(-np.mean(y * np.log(np.clip(p, eps, None))
                          + (1 - y) * np.log(np.clip(1 - p, eps, None))))
    d_logit = (p - y) / n
    grad_w = x.T @ d_logit
    grad_b = float(d_logit.sum())
    grad_embs = []
    offset = x_num.shape[1]
    for f, emb in enumerate(embeddings):
        g = np.zeros_like(emb)
        w_slice = w[offset:offset + emb.shape[1]]
        np.add.at(g, codes[:, f], d_logit[:, None] * w_slice[None, :])
        offset += emb.shape[1]
        grad_embs.append(g)
    return loss, grad_embs, grad_w, grad_b


def fit_entity_embeddings(records, labels, dims=None, epochs: int = 15,
                          step_size: float = 0.1, seed: int = 0) -> EmbeddingTable:
    """Learn level vectors by SGD on a logistic predictor of the labels.

    Deterministic in the seed: initialization and the per-epoch sample order
    come from one generator.
    """
    records = list(records)
    y = np.asarray(labels, dtype=np.float64)
    if len(records) != y.shape[0]:
        raise ValueError(f"{len(records)} records but {y.shape[0]} labels")
    if len(records) < 2:
        raise ValueError("need at least 2 records")
    if len(np.unique(y)) < 2:
        raise ValueError("labels contain a single class; cannot fit embeddings")
    numeric, categorical = _records_arrays(records)
    mean, std = _standardize_fit(numeric)
    x_num = _standardize_apply(numeric, mean, std)
    levels = _level_index(categorical, len(categorical[0]))
    cardinalities = [len(t) for t in levels]
    if dims is None:
        dims = embedding_dims(cardinalities)
    if len(dims) != len(cardinalities):
        raise ValueError("one embedding dimension per categorical feature required")
    codes = _cat_codes(categorical, levels)

    rng = np.random.default_rng(seed)
    embeddings = [rng.normal(0.0, 0.1, size=(k + 1, d)) for k, d in zip(cardinalities, dims)]
    width = x_num.shape[1] + sum(dims)
    w = rng.normal(0.0, 0.1, size=width)
    b = 0.0
    losses: list[float] = []
    n = len(records)
    for epoch in range(epochs):
        # harmonic decay keeps late epochs from bouncing around the optimum
        lr = step_size / (1.0 + 0.5 * epoch)
        order = rng.permutation(n)
        for i in order:
            xi = x_num[i:i + 1]
            ci = codes[i:i + 1]
            yi = y[i:i + 1]
            _, grad_embs, grad_w, grad_b = _loss_and_grads(embeddings, w, b, xi, ci, yi)
            for emb, g in zip(embeddings, grad_embs):
                emb -= lr * g
            w -= lr * grad_w
            b -= lr * grad_b
        loss, *_ = _loss_and_grads(embeddings, w, b, x_num, codes, y)
        losses.append(loss)
    return EmbeddingTable(
        levels=levels,
        vectors=embeddings,
        cardinalities=cardinalities,
        numeric_mean=mean,
        numeric_std=std,
        train_log_loss=losses,
    )


def encode(records, table: EmbeddingTable) -> np.ndarray:
    """Dense rows: standardized numerics followed by the level vectors."""
    records = list(records)
    numeric, categorical = _records_arrays(records)
    if numeric.shape[1] != table.numeric_mean.shape[0]:
        raise ValueError(
            f"expected {table.numeric_mean.shape[0]} numeric features, got {numeric.shape[1]}"
        )
    if categorical and len(categorical[0]) != len(table.levels):
        raise ValueError(
            f"expected {len(table.levels)} categorical features, got {len(categorical[0])}"
        )
    x_num = _standardize_apply(numeric, table.numeric_mean, table.numeric_std)
    codes = _cat_codes(categorical, table.levels)
    parts = [x_num]
    for f, emb in enumerate(table.vectors):
        parts.append(emb[codes[:, f]])
    return np.hstack(parts)


def encode_onehot(records, levels=None, numeric_stats=None):
    """One-hot ablation encoding: standardized numerics plus level indicators.

    Returns (matrix, levels, (mean, std)) so a fit on training data can be
    replayed on held-out data; unseen levels encode as all zeros.
    """
    records = list(records)
    numeric, categorical = _records_arrays(records)
    if numeric_stats is None:
        numeric_stats = _standardize_fit(numeric)
    mean, std = numeric_stats
    if levels is None:
        levels = _level_index(categorical, len(categorical[0]))
    x_num = _standardize_apply(numeric, mean, std)
    widths = [len(t) for t in levels]
    out = np.zeros((len(records), numeric.shape[1] + sum(widths)))
    out[:, :numeric.shape[1]] = x_num
    offset = numeric.shape[1]
    for f, table in enumerate(levels):
        for i, row in enumerate(categorical):
            col = table.get(row[f])
            if col is not None:
                out[i, offset + col] = 1.0
        offset += widths[f]
    return out, levels, (mean, std)


@dataclass(frozen=True)
class StudentConfig:
    n_rounds: int = 60
    learning_rate: float = 0.1
    max_depth: int = 4
    min_samples_leaf: int = 20
    embedding_dims: tuple[int, ...] | None = None
    embedding_epochs: int = 15
    embedding_step: float = 0.1
    seed: int = 0
    decision_threshold: float = DEFAULT_DECISION_THRESHOLD


@dataclass
class StudentModel:
    table: EmbeddingTable
    ensemble: gbdt.BoostedEnsemble
    decision_threshold: float


def train_student(records, labels, config: StudentConfig = StudentConfig()) -> StudentModel:
    records = list(records)
    y = np.asarray(labels, dtype=np.int64)
    table = fit_entity_embeddings(
        records, y,
        dims=list(config.embedding_dims) if config.embedding_dims else None,
        epochs=config.embedding_epochs,
        step_size=config.embedding_step,
        seed=config.seed,
    )
    X = encode(records, table)
    ensemble = gbdt.train(X, y, gbdt.GbdtConfig(
        task="binary",
        n_rounds=config.n_rounds,
        learning_rate=config.learning_rate,
        max_depth=config.max_depth,
        min_samples_leaf=config.min_samples_leaf,
    ))
    return StudentModel(table=table, ensemble=ensemble,
                        decision_threshold=config.decision_threshold)


def predict_scores(model: StudentModel, records) -> np.ndarray:
    """Positive-class probabilities for a batch of records."""
    X = encode(records, model.table)
    return gbdt.predict_proba_many(model.ensemble, X)[:, 1]


def predict_labels(model: StudentModel, records) -> np.ndarray:
    return (predict_scores(model, records) >= model.decision_threshold).astype(np.int64)


@dataclass(frozen=True)
class EvalMetrics:
    precision: float | None
    recall: float | None


def evaluate(predictions, labels) -> EvalMetrics:
    """Precision and recall; undefined cases come back as None, not 0."""
    preds = np.asarray(predictions, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    if preds.shape != y.shape:
        raise ValueError(f"length mismatch: {preds.shape} vs {y.shape}")
    tp = int(np.sum((preds == 1) & (y == 1)))
    fp = int(np.sum((preds == 1) & (y == 0)))
    fn = int(np.sum((preds == 0) & (y == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else None
    recall = tp / (tp + fn) if tp + fn > 0 else None
    return EvalMetrics(precision=precision, recall=recall)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

_NUMERIC_FEATURE = "__numeric__"


def save_embedding_table(path, table: EmbeddingTable) -> None:
    max_d = max([*table.dims, table.numeric_mean.shape[0]])
    lines = ["feature,level," + ",".join(f"v{j}" for j in range(max_d))]

    def row(feature: str, level: str, values) -> str:
        cells = [repr(float(v)) for v in values]
        cells.extend([""] * (max_d - len(cells)))
        return f"{feature},{level}," + ",".join(cells)

    lines.append(row(_NUMERIC_FEATURE, "mean", table.numeric_mean))
    lines.append(row(_NUMERIC_FEATURE, "std", table.numeric_std))
    for f, (levels, emb) in enumerate(zip(table.levels, table.vectors)):
        for lvl, i in sorted(levels.items(), key=lambda kv: kv[1]):
            lines.append(row(f"c{f}", lvl, emb[i]))
        lines.append(row(f"c{f}", UNSEEN_LEVEL, emb[len(levels)]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_embedding_table(path) -> EmbeddingTable:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("feature,level,"):
        raise SchemaError(f"{path}: missing embedding table header")
    numeric: dict[str, np.ndarray] = {}
    by_feature: dict[str, list[tuple[str, np.ndarray]]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) < 3:
            raise SchemaError(f"{path} line {lineno}: expected at least 3 fields")
        feature, level = parts[0], parts[1]
        try:
            vec = np.array([float(v) for v in parts[2:] if v != ""])
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad vector value") from exc
        if feature == _NUMERIC_FEATURE:
            numeric[level] = vec
        else:
            by_feature.setdefault(feature, []).append((level, vec))
    if "mean" not in numeric or "std" not in numeric:
        raise SchemaError(f"{path}: missing numeric standardization rows")
    levels: list[dict[str, int]] = []
    vectors: list[np.ndarray] = []
    for feature in sorted(by_feature, key=lambda s: int(s[1:])):
        rows = by_feature[feature]
        fallback = [vec for lvl, vec in rows if lvl == UNSEEN_LEVEL]
        named = [(lvl, vec) for lvl, vec in rows if lvl != UNSEEN_LEVEL]
        if not fallback:
            raise SchemaError(f"{path}: feature {feature} lacks a fallback row")
        levels.append({lvl: i for i, (lvl, _) in enumerate(named)})
        vectors.append(np.vstack([vec for _, vec in named] + fallback))
    return EmbeddingTable(
        levels=levels,
        vectors=vectors,
        cardinalities=[len(t) for t in levels],
        numeric_mean=numeric["mean"],
        numeric_std=numeric["std"],
    )


def save_student(directory, model: StudentModel) -> None:
    d = Path(directory)
    save_embedding_table(d / "embeddings.csv", model.table)
    gbdt.save_model(d / "student_model.txt", model.ensemble)
    (d / "student_meta.txt").write_text(
        f"decision_threshold={model.decision_threshold!r}\n"
    )


def load_student(directory) -> StudentModel:
    d = Path(directory)
    table = load_embedding_table(d / "embeddings.csv")
    ensemble = gbdt.load_model(d / "student_model.txt")
    meta = (d / "student_meta.txt").read_text().strip()
    key, _, val = meta.partition("=")
    if key != "decision_threshold":
        raise SchemaError(f"{d / 'student_meta.txt'}: missing decision_threshold")
    return StudentModel(table=table, ensemble=ensemble, decision_threshold=float(val))
