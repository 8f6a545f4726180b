"""Classifiers and their plumbing: feature standardization, a random
forest grown from scratch with cross-validated tree-count selection, a
multilayer perceptron trained with Adam, and versioned serialization
for both.
"""

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .backends import get_backend
from .errors import (EmptyDataset, LabelMismatch, ShapeMismatch, TooFewRows,
                     TooFewSamples, WidthMismatch)

MAX_TREE_DEPTH = 32
MIN_SAMPLES_SPLIT = 2
DEFAULT_TREE_GRID = (25, 50, 100, 200, 400)
WIDE_HIDDEN_DIMS = (60, 1000, 1000, 1000)
DESK_HIDDEN_DIMS = (64, 64)


# ---------------------------------------------------------------------------
# standardization

@dataclass
class Scaler:
    means: np.ndarray
    stds: np.ndarray

    @property
    def width(self):
        return self.means.shape[0]


def scaler_fit(matrix):
    """Per-column mean and population standard deviation.

    Columns with std below 1e-8 get std 1, so constant features map to
    exactly zero instead of exploding.
    """
    X = np.asarray(matrix, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TooFewRows("scaler needs at least 2 rows")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds < 1e-8, 1.0, stds)
    return Scaler(means=means, stds=stds)


def scaler_apply(scaler, row):
    """Standardize one row or a whole matrix."""
    x = np.asarray(row, dtype=np.float64)
    if x.shape[-1] != scaler.width:
        raise WidthMismatch(
            "row width %d does not match fitted width %d"
            % (x.shape[-1], scaler.width))
    return (x - scaler.means) / scaler.stds


def scaler_inverse(scaler, row):
    """Undo scaler_apply."""
    x = np.asarray(row, dtype=np.float64)
    if x.shape[-1] != scaler.width:
        raise WidthMismatch(
            "row width %d does not match fitted width %d"
            % (x.shape[-1], scaler.width))
    return x * scaler.stds + scaler.means


# ---------------------------------------------------------------------------
# random forest

@dataclass
class DecisionTree:
    """Flat node arrays; feature -1 marks a leaf holding its class."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf: np.ndarray


@dataclass
class RandomForestModel:
    trees: list
    n_trees: int
    classes: np.ndarray
    seed: int
    n_features: int


def _tree_seeds(seed, k):
    """Deterministic per-tree streams: bootstrap rng and feature-draw seed."""
    ss = np.random.SeedSequence([int(seed), int(k)])
    rng = np.random.default_rng(ss)
    feat_seed = np.uint64(ss.generate_state(2, dtype=np.uint64)[1])
    return rng, feat_seed


def rf_fit(X, y, n_trees, seed=0):
    """Grow a forest of n_trees bootstrap-trained trees.

    Each tree sees n draws with replacement and, at every node, a fresh
    subset of ceil(sqrt(d)) candidate features. Fully deterministic for
    a given seed: tree k's draws depend only on (seed, k).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmptyDataset("forest needs at least 2 training rows")
    if X.shape[0] != y.shape[0]:
        raise LabelMismatch(
            "%d rows but %d labels" % (X.shape[0], y.shape[0]))
    if int(n_trees) < 1:
        raise ValueError("n_trees must be at least 1")
    n, d = X.shape
    classes = np.unique(y)
    y_enc = np.searchsorted(classes, y).astype(np.int64)
    n_classes = classes.shape[0]
    m_feats = int(math.ceil(math.sqrt(d)))
    kernels = get_backend()
    trees = []
    for k in range(int(n_trees)):
        rng, feat_seed = _tree_seeds(seed, k)
        boot = rng.integers(0, n, size=n, dtype=np.int64)
        nodes = kernels.grow_tree(X, y_enc, boot, feat_seed, n_classes,
                                  MAX_TREE_DEPTH, MIN_SAMPLES_SPLIT, m_feats)
        trees.append(DecisionTree(*nodes))
    return RandomForestModel(trees=trees, n_trees=int(n_trees),
                             classes=classes, seed=int(seed), n_features=d)


def rf_predict_batch(model, X):
    """Majority vote over all trees for every row; ties to smallest id."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise WidthMismatch(
            "expected rows of width %d" % model.n_features)
    kernels = get_backend()
    n = X.shape[0]
    n_classes = model.classes.shape[0]
    votes = np.zeros((n, n_classes), dtype=np.int64)
    rows = np.arange(n)
    for t in model.trees:
        pred = kernels.tree_predict(t.feature, t.threshold, t.left, t.right,
                                    t.leaf, X)
        votes[rows, pred] += 1
    return model.classes[np.argmax(votes, axis=1)]


def rf_predict(model, row):
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != model.n_features:
        raise WidthMismatch("expected a row of width %d" % model.n_features)
    return int(rf_predict_batch(model, row[None, :])[0])


def select_n_trees_cv(X, y, grid=DEFAULT_TREE_GRID, folds=5, seed=0):
    """Pick the tree count with the best 5-fold mean validation accuracy.

    Indices are shuffled once with default_rng(seed) and cut into
    contiguous folds whose sizes differ by at most one (the first
    n % folds of them are larger). The forest for (value, fold) is
    seeded with SeedSequence([seed, value, fold]). Ties go to the
    smallest grid value.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    grid = sorted(int(g) for g in grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    n = X.shape[0]
    if n < folds:
        raise TooFewSamples("%d samples cannot make %d folds" % (n, folds))
    perm = np.random.default_rng(seed).permutation(n)
    base = n // folds
    extra = n % folds
    blocks = []
    start = 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        blocks.append(perm[start:start + size])
        start += size
    best_value = None
    best_mean = -1.0
    for value in grid:
        fold_accs = []
        for f in range(folds):
            val_idx = blocks[f]
            tr_idx = np.concatenate([blocks[g] for g in range(folds) if g != f])
            fold_seed = int(np.random.SeedSequence(
                [int(seed), int(value), int(f)]).generate_state(1)[0])
            model = rf_fit(X[tr_idx], y[tr_idx], value, fold_seed)
            pred = rf_predict_batch(model, X[val_idx])
            fold_accs.append(float(np.mean(pred == y[val_idx])))
        mean_acc = sum(fold_accs) / folds
        if mean_acc > best_mean:
            best_mean = mean_acc
            best_value = value
    return best_value


# ---------------------------------------------------------------------------
# multilayer perceptron

@dataclass
class MlpModel:
    """Affine stack with rectifier hidden layers.

    Output units are logistic by default; with softmax_output the final
    layer is a softmax instead.
    """

    layer_dims: list
    weights: list
    biases: list
    softmax_output: bool = False
    epochs_run: int = 0


@dataclass
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_epochs: int = 300
    seed: int = 0
    patience: int = 20
    min_delta: float = 1e-5
    hidden_dims: tuple = DESK_HIDDEN_DIMS
    val_fraction: float = 0.0
    softmax_output: bool = False
    n_classes: int = 0  # 0 means infer from the labels

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in [0, 1)")
        if self.max_epochs < 1 or self.patience < 1:
            raise ValueError("max_epochs and patience must be at least 1")


def mlp_init(layer_dims, seed=0, softmax_output=False, rng=None):
    """He-style initialization: N(0, sqrt(2/fan_in)) weights, zero biases."""
    if rng is None:
        rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for din, dout in zip(layer_dims[:-1], layer_dims[1:]):
        weights.append(rng.standard_normal((din, dout)) * math.sqrt(2.0 / din))
        biases.append(np.zeros(dout))
    return MlpModel(layer_dims=list(layer_dims), weights=weights,
                    biases=biases, softmax_output=softmax_output)


def _forward_pass(model, X):
    """Returns (activations per layer incl. input, final outputs)."""
    acts = [X]
    a = X
    last = len(model.weights) - 1
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W + b
        if i < last:
            a = np.maximum(z, 0.0)
        elif model.softmax_output:
            shifted = z - z.max(axis=1, keepdims=True)
            e = np.exp(shifted)
            a = e / e.sum(axis=1, keepdims=True)
        else:
            # saturated far before +-500; the clamp only stops exp overflow
            a = 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))
        acts.append(a)
    return acts, a


def mlp_forward(model, batch):
    """Per-class outputs in (0, 1) for a batch (or one row)."""
    X = np.asarray(batch, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.layer_dims[0]:
        raise WidthMismatch(
            "input width %d does not match layer width %d"
            % (X.shape[1], model.layer_dims[0]))
    _, out = _forward_pass(model, X)
    return out[0] if single else out


def mlp_loss_and_grad(model, batch, onehot):
    """Mean categorical cross-entropy and its exact gradients.

    Logistic outputs do not form a distribution, so they are
    renormalized to one inside the loss; the gradient is the chain rule
    through that renormalization. With softmax_output the standard
    softmax cross-entropy applies.
    """
    X = np.asarray(batch, dtype=np.float64)
    Y = np.asarray(onehot, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ShapeMismatch("batch and labels disagree in shape")
    if X.shape[1] != model.layer_dims[0] or Y.shape[1] != model.layer_dims[-1]:
        raise ShapeMismatch("batch or label width does not match the network")
    n = X.shape[0]
    acts, out = _forward_pass(model, X)
    if model.softmax_output:
        p = np.clip(out, 1e-12, 1.0)
        loss = float(-np.mean(np.sum(Y * np.log(p), axis=1)))
        delta = (out - Y) / n
    else:
        s = np.clip(out, 1e-12, 1.0 - 1e-12)
        total = s.sum(axis=1, keepdims=True)
        p = s / total
        loss = float(-np.mean(np.sum(Y * np.log(p), axis=1)))
        delta = (s * (1.0 - s) / total - Y * (1.0 - s)) / n
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        a_prev = acts[i]
        grads_w[i] = a_prev.T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)
    return loss, (grads_w, grads_b)


def adam_init(params):
    """Fresh optimizer state for a list of parameter arrays."""
    return {"step": 0,
            "m": [np.zeros_like(p) for p in params],
            "v": [np.zeros_like(p) for p in params]}


def adam_step(params, grads, state, config):
    """One bias-corrected Adam update, in place; returns (params, state)."""
    if len(params) != len(grads) or len(params) != len(state["m"]):
        raise ShapeMismatch("parameter, gradient and state lists disagree")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ShapeMismatch(
                "gradient shape %r does not match parameter shape %r"
                % (g.shape, p.shape))
    state["step"] += 1
    t = state["step"]
    b1 = config.beta1
    b2 = config.beta2
    lr = config.learning_rate
    eps = config.epsilon
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params, state


def _onehot(y, n_classes):
    Y = np.zeros((y.shape[0], n_classes))
    Y[np.arange(y.shape[0]), y] = 1.0
    return Y


def mlp_train(X, y, config=None):
    """Train an MLP with shuffled mini-batches and Adam.

    Stops at max_epochs or once the watched loss (training loss, or
    validation loss when val_fraction > 0) has not improved by at least
    min_delta for `patience` epochs. Deterministic for a given seed:
    initialization and every epoch's shuffle come from one stream.
    """
    if config is None:
        config = TrainConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyDataset("no training rows")
    if X.shape[0] != y.shape[0]:
        raise LabelMismatch("%d rows but %d labels" % (X.shape[0], y.shape[0]))
    n_classes = config.n_classes if config.n_classes > 0 else int(y.max()) + 1
    dims = [X.shape[1]] + list(config.hidden_dims) + [n_classes]
    rng = np.random.default_rng(config.seed)
    model = mlp_init(dims, softmax_output=config.softmax_output, rng=rng)
    n = X.shape[0]
    n_val = int(round(config.val_fraction * n)) if config.val_fraction > 0 else 0
    if n_val > 0:
        perm = rng.permutation(n)
        val_idx = perm[n - n_val:]
        tr_idx = perm[:n - n_val]
    else:
        val_idx = np.empty(0, dtype=np.int64)
        tr_idx = np.arange(n)
    Xtr = X[tr_idx]
    Ytr = _onehot(y[tr_idx], n_classes)
    Xval = X[val_idx]
    Yval = _onehot(y[val_idx], n_classes) if n_val > 0 else None
    params = model.weights + model.biases
    state = adam_init(params)
    n_tr = Xtr.shape[0]
    best = math.inf
    wait = 0
    for epoch in range(config.max_epochs):
        model.epochs_run = epoch + 1
        order = rng.permutation(n_tr)
        epoch_loss = 0.0
        for start in range(0, n_tr, config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, (gw, gb) = mlp_loss_and_grad(model, Xtr[batch], Ytr[batch])
            adam_step(params, gw + gb, state, config)
            epoch_loss += loss * batch.shape[0]
        epoch_loss /= n_tr
        for p in params:
            if not np.all(np.isfinite(p)):
                raise FloatingPointError("training produced non-finite parameters")
        if n_val > 0:
            watched, _ = mlp_loss_and_grad(model, Xval, Yval)
        else:
            watched = epoch_loss
        if watched < best - config.min_delta:
            best = watched
            wait = 0
        else:
            wait += 1
            if wait >= config.patience:
                break
    return model


def mlp_predict_batch(model, X):
    out = mlp_forward(model, np.atleast_2d(np.asarray(X, dtype=np.float64)))
    return np.argmax(out, axis=1)


def mlp_predict(model, row):
    """Class of the strongest output unit; smallest id on exact ties."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise WidthMismatch("expected a single row")
    return int(np.argmax(mlp_forward(model, row)))


# ---------------------------------------------------------------------------
# serialization

MODEL_MAGIC = b"EMGM"
MODEL_VERSION = 1

_DTYPE_CODES = {"<f8": 0, "<i4": 1, "<i8": 2}
_CODE_DTYPES = {0: "<f8", 1: "<i4", 2: "<i8"}


@dataclass
class TrainedBundle:
    """A fitted scaler + classifier pair plus its pipeline settings."""

    kind: str  # "rf" or "nn"
    scaler: Scaler
    model: object
    meta: dict = field(default_factory=dict)


def _write_array(fh, a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    fh.write(struct.pack("<B", _DTYPE_CODES[dtype]))
    fh.write(struct.pack("<B", a.ndim))
    for s in a.shape:
        fh.write(struct.pack("<I", s))
    fh.write(a.tobytes())


def _read_array(fh):
    code = struct.unpack("<B", fh.read(1))[0]
    ndim = struct.unpack("<B", fh.read(1))[0]
    shape = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(ndim))
    dtype = np.dtype(_CODE_DTYPES[code])
    count = int(np.prod(shape)) if shape else 1
    a = np.frombuffer(fh.read(count * dtype.itemsize), dtype=dtype)
    return a.reshape(shape).copy()


def save_model(path, bundle):
    """Write a bundle to a flat versioned binary; byte-deterministic."""
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<B", MODEL_VERSION))
        fh.write(struct.pack("<B", 0 if bundle.kind == "rf" else 1))
        meta = json.dumps(bundle.meta, sort_keys=True).encode("utf-8")
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        _write_array(fh, bundle.scaler.means, "<f8")
        _write_array(fh, bundle.scaler.stds, "<f8")
        if bundle.kind == "rf":
            m = bundle.model
            _write_array(fh, m.classes, "<i8")
            fh.write(struct.pack("<I", m.n_trees))
            fh.write(struct.pack("<Q", m.seed))
            fh.write(struct.pack("<I", m.n_features))
            for t in m.trees:
                _write_array(fh, t.feature, "<i4")
                _write_array(fh, t.threshold, "<f8")
                _write_array(fh, t.left, "<i4")
                _write_array(fh, t.right, "<i4")
                _write_array(fh, t.leaf, "<i4")
        else:
            m = bundle.model
            _write_array(fh, np.asarray(m.layer_dims, dtype=np.int64), "<i8")
            fh.write(struct.pack("<B", 1 if m.softmax_output else 0))
            for W, b in zip(m.weights, m.biases):
                _write_array(fh, W, "<f8")
                _write_array(fh, b, "<f8")


def load_model(path):
    """Read a bundle written by save_model."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MODEL_MAGIC:
            raise ValueError("not a model file (bad magic)")
        version = struct.unpack("<B", fh.read(1))[0]
        if version != MODEL_VERSION:
            raise ValueError("unsupported model version %d" % version)
        kind = "rf" if struct.unpack("<B", fh.read(1))[0] == 0 else "nn"
        meta_len = struct.unpack("<I", fh.read(4))[0]
        meta = json.loads(fh.read(meta_len).decode("utf-8"))
        scaler = Scaler(means=_read_array(fh), stds=_read_array(fh))
        if kind == "rf":
            classes = _read_array(fh)
            n_trees = struct.unpack("<I", fh.read(4))[0]
            seed = struct.unpack("<Q", fh.read(8))[0]
            n_features = struct.unpack("<I", fh.read(4))[0]
            trees = []
            for _ in range(n_trees):
                trees.append(DecisionTree(
                    feature=_read_array(fh), threshold=_read_array(fh),
                    left=_read_array(fh), right=_read_array(fh),
                    leaf=_read_array(fh)))
            model = RandomForestModel(trees=trees, n_trees=n_trees,
                                      classes=classes, seed=seed,
                                      n_features=n_features)
        else:
            dims = [int(v) for v in _read_array(fh)]
            softmax = struct.unpack("<B", fh.read(1))[0] == 1
            weights = []
            biases = []
            for _ in range(len(dims) - 1):
                weights.append(_read_array(fh))
                biases.append(_read_array(fh))
            model = MlpModel(layer_dims=dims, weights=weights, biases=biases,
                             softmax_output=softmax)
    return TrainedBundle(kind=kind, scaler=scaler, model=model, meta=meta)
