"""Gradient-boosted decision trees with per-round staged probability outputs.

Cross-entropy objective (softmax link for multiclass, logistic for binary),
exact greedy splits on (feature, threshold) midpoints, one-Newton-step leaf
values, shrinkage applied per round. No row or feature subsampling: training
is fully deterministic, with split-gain ties broken by lowest feature index
and then lowest threshold.

Split search runs level-wise: one descending-value sweep over a column-sorted
layout evaluates every candidate for every active node of the level, so a
tree costs O(depth * nnz) regardless of node count. Sparse inputs treat
absent values as zero; their feature values must be nonnegative so that the
implicit-zero block always routes left of any positive threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import SchemaError
from .textvec import SparseVector, to_csr

_EPS = 1e-12
_MIN_GAIN = 1e-12
_MAX_LEAF = 25.0  # Newton overshoot guard; scores beyond this saturate the link anyway

TASKS = ("multiclass", "binary")


@dataclass(frozen=True)
class GbdtConfig:
    task: str = "multiclass"
    n_classes: int | None = None  # inferred from labels when None
    n_rounds: int = 60
    learning_rate: float = 0.1
    max_depth: int = 4
    min_samples_leaf: int = 20


@dataclass(frozen=True)
class Tree:
    """Array-of-nodes binary tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]


@dataclass
class BoostedEnsemble:
    task: str
    n_classes: int  # 2 for binary
    n_rounds: int
    learning_rate: float
    base_scores: np.ndarray  # (C,) multiclass, (1,) binary
    trees: list[list[Tree]]  # [round][class slot]; binary has one slot
    train_log_loss: list[float] = field(default_factory=list, repr=False)

    @property
    def n_slots(self) -> int:
        return 1 if self.task == "binary" else self.n_classes


# ---------------------------------------------------------------------------
# column-sorted input layout
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ColumnStore:
    vals: np.ndarray  # float64, ascending within each column
    rows: np.ndarray  # int32
    col_ptr: np.ndarray  # int64, length n_cols + 1
    n_rows: int
    n_cols: int
    sparse: bool  # True when absent entries are implicit zeros


def _store_from_dense(X: np.ndarray) -> _ColumnStore:
    X = np.ascontiguousarray(X, dtype=np.float64)
    n, f = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    vals = np.take_along_axis(X, order, axis=0).T.ravel()
    rows = order.T.ravel().astype(np.int32)
    col_ptr = np.arange(f + 1, dtype=np.int64) * n
    return _ColumnStore(vals, rows, col_ptr, n, f, sparse=False)


def _store_from_csr(data, indices, indptr, n_cols: int) -> _ColumnStore:
    n = indptr.shape[0] - 1
    if np.any(data < 0):
        raise ValueError("sparse inputs require nonnegative feature values")
    row_ids = np.repeat(np.arange(n, dtype=np.int32), np.diff(indptr))
    order = np.lexsort((data, indices))
    vals = data[order]
    rows = row_ids[order]
    counts = np.bincount(indices, minlength=n_cols)
    col_ptr = np.zeros(n_cols + 1, dtype=np.int64)
    np.cumsum(counts, out=col_ptr[1:])
    return _ColumnStore(vals, rows, col_ptr, n, n_cols, sparse=True)


def _prepare_training_input(X, n_features: int | None = None) -> _ColumnStore:
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError("dense input must be a 2-D array")
        return _store_from_dense(X)
    vecs = list(X)
    if not all(isinstance(v, SparseVector) for v in vecs):
        raise ValueError("expected a 2-D array or a sequence of SparseVector")
    if n_features is None:
        n_features = 1 + max((int(v.indices[-1]) for v in vecs if v.nnz), default=-1)
    data, indices, indptr = to_csr(vecs, n_features)
    return _store_from_csr(data, indices, indptr, n_features)


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _scan_level(vals, rows, col_ptr, slot, grad, hess, node_g, node_h, node_n,
                n_slots, sparse, msl, best_gain, best_col, best_thr):
    """Best split per active node, sweeping each column in descending value order.

    Within a column, ties on gain keep the later candidate (lower threshold);
    across columns the earlier column wins, giving the documented
    lowest-feature-then-lowest-threshold tie-break.
    """
    sg = np.zeros(n_slots, dtype=np.float64)
    sh = np.zeros(n_slots, dtype=np.float64)
    sc = np.zeros(n_slots, dtype=np.int64)
    last = np.zeros(n_slots, dtype=np.float64)
    col_gain = np.zeros(n_slots, dtype=np.float64)
    col_thr = np.zeros(n_slots, dtype=np.float64)
    touched = np.zeros(n_slots, dtype=np.int64)
    for s in range(n_slots):
        best_gain[s] = -1.0
        best_col[s] = -1
        best_thr[s] = 0.0
    n_cols = col_ptr.shape[0] - 1
    for j in range(n_cols):
        nt = 0
        for k in range(col_ptr[j + 1] - 1, col_ptr[j] - 1, -1):
            r = rows[k]
            s = slot[r]
            if s < 0:
                continue
            v = vals[k]
            if sc[s] == 0:
                touched[nt] = s
                nt += 1
                col_gain[s] = -1.0
            elif last[s] > v:
                n_right = sc[s]
                n_left = node_n[s] - n_right
                if n_left >= msl and n_right >= msl:
                    gl = node_g[s] - sg[s]
                    hl = node_h[s] - sh[s]
                    gain = (gl * gl / (hl + _EPS) + sg[s] * sg[s] / (sh[s] + _EPS)
                            - node_g[s] * node_g[s] / (node_h[s] + _EPS))
                    if gain >= col_gain[s]:
                        col_gain[s] = gain
                        col_thr[s] = 0.5 * (v + last[s])
            sg[s] += grad[r]
            sh[s] += hess[r]
            sc[s] += 1
            last[s] = v
        for t in range(nt):
            s = touched[t]
            if sparse:
                # boundary between the implicit-zero block and the smallest
                # stored value of this node
                n_right = sc[s]
                n_left = node_n[s] - n_right
                if n_left >= msl and n_right >= msl and last[s] > 0.0:
                    gl = node_g[s] - sg[s]
                    hl = node_h[s] - sh[s]
                    gain = (gl * gl / (hl + _EPS) + sg[s] * sg[s] / (sh[s] + _EPS)
                            - node_g[s] * node_g[s] / (node_h[s] + _EPS))
                    if gain >= col_gain[s]:
                        col_gain[s] = gain
                        col_thr[s] = 0.5 * last[s]
            if col_gain[s] > best_gain[s]:
                best_gain[s] = col_gain[s]
                best_col[s] = j
                best_thr[s] = col_thr[s]
            sg[s] = 0.0
            sh[s] = 0.0
            sc[s] = 0


@njit(cache=True)
def _mark_right(vals, rows, col_ptr, slot, split_col, split_thr, right_flag):
    for s in range(split_col.shape[0]):
        j = split_col[s]
        if j < 0:
            continue
        thr = split_thr[s]
        for k in range(col_ptr[j], col_ptr[j + 1]):
            if slot[rows[k]] == s and vals[k] > thr:
                right_flag[rows[k]] = 1


@njit(cache=True)
def _advance(slot, right_flag, action, value_by_slot, left_child_slot, leaf_out):
    for i in range(slot.shape[0]):
        s = slot[i]
        if s < 0:
            continue
        if action[s] == 0:
            leaf_out[i] = value_by_slot[s]
            slot[i] = -1
        else:
            slot[i] = left_child_slot[s] + right_flag[i]


@njit(cache=True)
def _predict_tree_csr(feature, threshold, left, right, value,
                      data, indices, indptr, out):
    for i in range(indptr.shape[0] - 1):
        node = 0
        while feature[node] >= 0:
            f = feature[node]
            lo = indptr[i]
            hi = indptr[i + 1]
            x = 0.0
            while lo < hi:
                mid = (lo + hi) // 2
                c = indices[mid]
                if c == f:
                    x = data[mid]
                    break
                elif c < f:
                    lo = mid + 1
                else:
                    hi = mid
            node = left[node] if x <= threshold[node] else right[node]
        out[i] = value[node]


@njit(cache=True)
def _predict_tree_dense(feature, threshold, left, right, value, X, out):
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            node = left[node] if X[i, feature[node]] <= threshold[node] else right[node]
        out[i] = value[node]


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def _fit_tree(store: _ColumnStore, grad, hess, max_depth: int, msl: int):
    """Fit one regression tree to (grad, hess); returns the tree and the
    per-sample leaf values (so training never re-traverses)."""
    n = store.n_rows
    slot = np.zeros(n, dtype=np.int32)
    leaf_out = np.zeros(n, dtype=np.float64)
    feature = [-1]
    threshold = [0.0]
    left = [-1]
    right = [-1]
    value = [0.0]
    level_nodes = [0]
    for depth in range(max_depth + 1):
        n_slots = len(level_nodes)
        if n_slots == 0:
            break
        active = slot >= 0
        sl = slot[active]
        node_g = np.bincount(sl, weights=grad[active], minlength=n_slots)
        node_h = np.bincount(sl, weights=hess[active], minlength=n_slots)
        node_n = np.bincount(sl, minlength=n_slots).astype(np.int64)
        best_gain = np.empty(n_slots, dtype=np.float64)
        best_col = np.empty(n_slots, dtype=np.int64)
        best_thr = np.empty(n_slots, dtype=np.float64)
        if depth < max_depth:
            _scan_level(store.vals, store.rows, store.col_ptr, slot, grad, hess,
                        node_g, node_h, node_n, n_slots, store.sparse, msl,
                        best_gain, best_col, best_thr)
        else:
            best_col[:] = -1
        action = np.zeros(n_slots, dtype=np.int8)
        value_by_slot = np.zeros(n_slots, dtype=np.float64)
        left_child_slot = np.full(n_slots, -1, dtype=np.int32)
        split_col = np.full(n_slots, -1, dtype=np.int64)
        split_thr = np.zeros(n_slots, dtype=np.float64)
        next_level: list[int] = []
        for s, nid in enumerate(level_nodes):
            if best_col[s] >= 0 and best_gain[s] > _MIN_GAIN:
                action[s] = 1
                lid = len(feature)
                feature[nid] = int(best_col[s])
                threshold[nid] = float(best_thr[s])
                left[nid] = lid
                right[nid] = lid + 1
                feature.extend((-1, -1))
                threshold.extend((0.0, 0.0))
                left.extend((-1, -1))
                right.extend((-1, -1))
                value.extend((0.0, 0.0))
                left_child_slot[s] = len(next_level)
                next_level.extend((lid, lid + 1))
                split_col[s] = best_col[s]
                split_thr[s] = best_thr[s]
            else:
                w = -node_g[s] / (node_h[s] + _EPS)
                w = min(max(w, -_MAX_LEAF), _MAX_LEAF)
                value[nid] = float(w)
                value_by_slot[s] = w
        right_flag = np.zeros(n, dtype=np.int8)
        if next_level:
            _mark_right(store.vals, store.rows, store.col_ptr, slot,
                        split_col, split_thr, right_flag)
        _advance(slot, right_flag, action, value_by_slot, left_child_slot, leaf_out)
        level_nodes = next_level
    tree = Tree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )
    return tree, leaf_out


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _log_loss(scores: np.ndarray, y: np.ndarray, task: str) -> float:
    if task == "binary":
        p = np.clip(_sigmoid(scores[:, 0]), 1e-15, 1 - 1e-15)
        return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
    p = np.clip(_softmax_rows(scores), 1e-15, None)
    return float(-np.mean(np.log(p[np.arange(y.shape[0]), y])))


def train(X, y, config: GbdtConfig) -> BoostedEnsemble:
    """Train a boosted ensemble; X is a dense 2-D array or SparseVector rows."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if config.task not in TASKS:
        raise ValueError(f"unknown task {config.task!r}; expected one of {TASKS}")
    if config.n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    if not 0.0 < config.learning_rate <= 1.0:
        raise ValueError("learning_rate must lie in (0, 1]")
    if config.max_depth < 0 or config.min_samples_leaf < 1:
        raise ValueError("max_depth must be >= 0 and min_samples_leaf >= 1")
    store = _prepare_training_input(X)
    n = store.n_rows
    if n != y.shape[0]:
        raise ValueError(f"got {n} rows but {y.shape[0]} labels")
    if n < 2:
        raise ValueError("need at least 2 training samples")
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError("labels must be integers")
    y = y.astype(np.int64)

    if config.task == "binary":
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("binary task requires labels in {0, 1}")
        pos = y.mean()
        if pos in (0.0, 1.0):
            raise ValueError("binary training data contains a single class")
        n_classes = 2
        base = np.array([np.log(pos / (1.0 - pos))])
    else:
        n_classes = config.n_classes if config.n_classes is not None else int(y.max()) + 1
        if n_classes < 2:
            raise ValueError("multiclass task requires at least 2 classes")
        counts = np.bincount(y, minlength=n_classes) if y.min() >= 0 else None
        if counts is None or y.max() >= n_classes or np.any(counts == 0):
            missing = [] if counts is None else [c for c in range(n_classes) if counts[c] == 0]
            raise ValueError(
                f"labels must cover every class in 0..{n_classes - 1}; missing {missing}"
            )
        base = np.log(counts / n)

    n_slots = 1 if config.task == "binary" else n_classes
    scores = np.repeat(base[None, :], n, axis=0)
    eta = config.learning_rate
    trees: list[list[Tree]] = []
    losses: list[float] = []
    for _ in range(config.n_rounds):
        if config.task == "binary":
            p = _sigmoid(scores[:, 0])
            probs = p[:, None]
        else:
            probs = _softmax_rows(scores)
        round_trees: list[Tree] = []
        for c in range(n_slots):
            pc = probs[:, c]
            g = pc - (y == c) if config.task == "multiclass" else pc - y
            h = pc * (1.0 - pc)
            tree, leaf_out = _fit_tree(store, g, h, config.max_depth,
                                       config.min_samples_leaf)
            scores[:, c] += eta * leaf_out
            round_trees.append(tree)
        trees.append(round_trees)
        losses.append(_log_loss(scores, y, config.task))
    return BoostedEnsemble(
        task=config.task,
        n_classes=n_classes,
        n_rounds=config.n_rounds,
        learning_rate=eta,
        base_scores=base,
        trees=trees,
        train_log_loss=losses,
    )


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------


def _leaf_value_one(tree: Tree, lookup) -> float:
    node = 0
    while tree.feature[node] >= 0:
        x = lookup(int(tree.feature[node]))
        node = int(tree.left[node]) if x <= tree.threshold[node] else int(tree.right[node])
    return float(tree.value[node])


def _make_lookup(x):
    if isinstance(x, SparseVector):
        idx, val = x.indices, x.values

        def lookup(f: int) -> float:
            k = np.searchsorted(idx, f)
            if k < idx.shape[0] and idx[k] == f:
                return float(val[k])
            return 0.0

        return lookup
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a single input row")
    return lambda f: float(arr[f])


def _probs_from_scores(scores: np.ndarray, task: str) -> np.ndarray:
    if task == "binary":
        p = float(_sigmoid(scores[0]))
        return np.array([1.0 - p, p])
    z = scores - scores.max()
    e = np.exp(z)
    return e / e.sum()


def staged_predict_proba(ensemble: BoostedEnsemble, x) -> list[np.ndarray]:
    """Probability vectors after each boosting round (base score included)."""
    lookup = _make_lookup(x)
    scores = ensemble.base_scores.copy()
    out = []
    for round_trees in ensemble.trees:
        for c, tree in enumerate(round_trees):
            scores[c] += ensemble.learning_rate * _leaf_value_one(tree, lookup)
        out.append(_probs_from_scores(scores, ensemble.task))
    return out


def predict_proba(ensemble: BoostedEnsemble, x) -> np.ndarray:
    """Probability vector over classes; bit-identical to the last staged output."""
    lookup = _make_lookup(x)
    scores = ensemble.base_scores.copy()
    for round_trees in ensemble.trees:
        for c, tree in enumerate(round_trees):
            scores[c] += ensemble.learning_rate * _leaf_value_one(tree, lookup)
    return _probs_from_scores(scores, ensemble.task)


def _prepare_rows(X, n_features: int | None = None):
    """Normalize batch input to ('dense', array) or ('csr', triple)."""
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError("dense input must be a 2-D array")
        return "dense", np.ascontiguousarray(X, dtype=np.float64)
    if isinstance(X, tuple) and len(X) == 3:
        data, indices, indptr = X
        return "csr", (np.asarray(data, np.float64), np.asarray(indices, np.int32),
                       np.asarray(indptr, np.int64))
    vecs = list(X)
    if n_features is None:
        n_features = 1 + max((int(v.indices[-1]) for v in vecs if v.nnz), default=-1)
    return "csr", to_csr(vecs, n_features)


def _apply_tree_batch(tree: Tree, kind: str, prepared, out: np.ndarray) -> None:
    if kind == "dense":
        _predict_tree_dense(tree.feature, tree.threshold, tree.left, tree.right,
                            tree.value, prepared, out)
    else:
        data, indices, indptr = prepared
        _predict_tree_csr(tree.feature, tree.threshold, tree.left, tree.right,
                          tree.value, data, indices, indptr, out)


def _batch_probs(scores: np.ndarray, task: str) -> np.ndarray:
    if task == "binary":
        p = _sigmoid(scores[:, 0])
        return np.column_stack([1.0 - p, p])
    return _softmax_rows(scores)


def predict_proba_many(ensemble: BoostedEnsemble, X, n_features: int | None = None):
    """Batch probabilities, shape (n, n_classes)."""
    kind, prepared = _prepare_rows(X, n_features)
    n = prepared.shape[0] if kind == "dense" else prepared[2].shape[0] - 1
    scores = np.repeat(ensemble.base_scores[None, :], n, axis=0)
    tmp = np.empty(n, dtype=np.float64)
    for round_trees in ensemble.trees:
        for c, tree in enumerate(round_trees):
            _apply_tree_batch(tree, kind, prepared, tmp)
            scores[:, c] += ensemble.learning_rate * tmp
    return _batch_probs(scores, ensemble.task)


def staged_probs_many(ensemble: BoostedEnsemble, X, n_features: int | None = None):
    """Staged batch probabilities, shape (n_rounds, n, n_classes)."""
    kind, prepared = _prepare_rows(X, n_features)
    n = prepared.shape[0] if kind == "dense" else prepared[2].shape[0] - 1
    scores = np.repeat(ensemble.base_scores[None, :], n, axis=0)
    out = np.empty((ensemble.n_rounds, n, ensemble.n_classes), dtype=np.float64)
    tmp = np.empty(n, dtype=np.float64)
    for t, round_trees in enumerate(ensemble.trees):
        for c, tree in enumerate(round_trees):
            _apply_tree_batch(tree, kind, prepared, tmp)
            scores[:, c] += ensemble.learning_rate * tmp
        out[t] = _batch_probs(scores, ensemble.task)
    return out


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _tree_to_lines(tree: Tree, lines: list[str]) -> None:
    def rec(node: int) -> None:
        if tree.feature[node] < 0:
            lines.append(f"l {float(tree.value[node])!r}")
        else:
            lines.append(f"i {int(tree.feature[node])} {float(tree.threshold[node])!r}")
            rec(int(tree.left[node]))
            rec(int(tree.right[node]))

    rec(0)


def _tree_from_lines(lines: list[str], pos: int, where: str) -> tuple[Tree, int]:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def rec(pos: int) -> tuple[int, int]:
        if pos >= len(lines):
            raise SchemaError(f"{where}: truncated tree")
        parts = lines[pos].split()
        nid = len(feature)
        if parts[0] == "l":
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(parts[1]))
            return nid, pos + 1
        if parts[0] != "i" or len(parts) != 3:
            raise SchemaError(f"{where} line {pos + 1}: bad node {lines[pos]!r}")
        feature.append(int(parts[1]))
        threshold.append(float(parts[2]))
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        lid, pos = rec(pos + 1)
        rid, pos = rec(pos)
        left[nid] = lid
        right[nid] = rid
        return nid, pos

    _, pos = rec(pos)
    tree = Tree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )
    return tree, pos


def save_model(path, ensemble: BoostedEnsemble) -> None:
    lines = [
        "format=gbdt-v1",
        f"task={ensemble.task}",
        f"n_classes={ensemble.n_classes}",
        f"n_rounds={ensemble.n_rounds}",
        f"learning_rate={ensemble.learning_rate!r}",
        "base_scores=" + " ".join(repr(float(b)) for b in ensemble.base_scores),
    ]
    for t, round_trees in enumerate(ensemble.trees):
        for c, tree in enumerate(round_trees):
            lines.append(f"tree round={t} class={c} n_nodes={tree.n_nodes}")
            _tree_to_lines(tree, lines)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> BoostedEnsemble:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "format=gbdt-v1":
        raise SchemaError(f"{path}: not a gbdt-v1 model file")
    header: dict[str, str] = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("tree "):
        key, _, val = lines[pos].partition("=")
        header[key] = val
        pos += 1
    try:
        task = header["task"]
        n_classes = int(header["n_classes"])
        n_rounds = int(header["n_rounds"])
        eta = float(header["learning_rate"])
        base = np.array([float(s) for s in header["base_scores"].split()])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"{path}: bad model header ({exc})") from exc
    if task not in TASKS:
        raise SchemaError(f"{path}: unknown task {task!r}")
    n_slots = 1 if task == "binary" else n_classes
    trees: list[list[Tree]] = []
    for t in range(n_rounds):
        round_trees = []
        for c in range(n_slots):
            if pos >= len(lines) or not lines[pos].startswith("tree "):
                raise SchemaError(f"{path}: expected tree round={t} class={c}")
            pos += 1
            tree, pos = _tree_from_lines(lines, pos, str(path))
            round_trees.append(tree)
        trees.append(round_trees)
    return BoostedEnsemble(
        task=task,
        n_classes=n_classes,
        n_rounds=n_rounds,
        learning_rate=eta,
        base_scores=base,
        trees=trees,
    )
