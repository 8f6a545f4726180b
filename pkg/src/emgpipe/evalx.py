"""Dataset splitting, confusion matrices, classification metrics, and
wall-clock stage benchmarking.
"""

import time
from dataclasses import dataclass

import numpy as np

from ._util import round_half_up
from .errors import (EmptyMatrix, LabelOutOfRange, LengthMismatch, TooFew,
                     TooFewReps)


@dataclass
class SplitIndices:
    train: np.ndarray
    test: np.ndarray
    seed: int


@dataclass
class ConfusionMatrix:
    """counts[t][p]: samples of true class t predicted as p."""

    counts: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: list  # (precision, recall, f1) per class


@dataclass
class LatencyReport:
    stage: str
    mean_ms: float
    std_ms: float
    repetitions: int


def shuffle_split(n, train_fraction=0.8, seed=0):
    """Seeded permutation split; the first round(train_fraction * n)
    indices train, the rest test."""
    n = int(n)
    if n < 5:
        raise TooFew("need at least 5 samples to split, got %d" % n)
    perm = np.random.default_rng(seed).permutation(n)
    k = round_half_up(train_fraction * n)
    return SplitIndices(train=perm[:k], test=perm[k:], seed=int(seed))


def confusion(y_true, y_pred, n_classes=8):
    """Tally an n_classes x n_classes matrix, rows true, columns predicted."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape[0] != y_pred.shape[0]:
        raise LengthMismatch(
            "%d true labels vs %d predictions"
            % (y_true.shape[0], y_pred.shape[0]))
    for arr, what in ((y_true, "true"), (y_pred, "predicted")):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise LabelOutOfRange(
                "%s labels fall outside 0..%d" % (what, n_classes - 1))
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts=counts)


def metrics(cm):
    """Accuracy plus per-class and macro precision, recall, F1.

    precision = TP / (TP + FP), recall = TP / (TP + FN),
    F1 = TP / (TP + (FP + FN) / 2). A class with a zero denominator
    contributes 0 to the unweighted macro means.
    """
    counts = np.asarray(cm.counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix has no samples")
    k = counts.shape[0]
    per_class = []
    for c in range(k):
        tp = float(counts[c, c])
        fp = float(counts[:, c].sum() - counts[c, c])
        fn = float(counts[c, :].sum() - counts[c, c])
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        denom = tp + 0.5 * (fp + fn)
        f1 = tp / denom if denom > 0 else 0.0
        per_class.append((precision, recall, f1))
    return MetricsReport(
        accuracy=float(np.trace(counts)) / total,
        macro_precision=sum(p for p, _, _ in per_class) / k,
        macro_recall=sum(r for _, r, _ in per_class) / k,
        macro_f1=sum(f for _, _, f in per_class) / k,
        per_class=per_class,
    )


def bench_stage(stage, reps, warmup=0, name="stage"):
    """Time a callable over reps repetitions after warmup discards.

    Repetitions run sequentially on one thread; each result is kept in a
    local so the work cannot be skipped. Reports mean and sample
    standard deviation in milliseconds.
    """
    if reps < 5:
        raise TooFewReps("need at least 5 repetitions, got %d" % reps)
    for _ in range(int(warmup)):
        stage()
    times_ms = np.empty(int(reps))
    sink = None
    for i in range(int(reps)):
        t0 = time.perf_counter()
        sink = stage()
        t1 = time.perf_counter()
        times_ms[i] = (t1 - t0) * 1000.0
    del sink
    return LatencyReport(stage=name,
                         mean_ms=float(times_ms.mean()),
                         std_ms=float(times_ms.std(ddof=1)),
                         repetitions=int(reps))
