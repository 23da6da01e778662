"""
Clustering evaluation: label alignment, accuracy and dispersion scores.

Predicted clusters are matched to ground-truth clusters by an optimal
assignment on the confusion matrix. Dispersions always recompute the
centroids from the labels, so every pipeline is scored the same way.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .spdcluster_config import get_config
from .spdcluster_errors import DimMismatch, LabelOutOfRange
from .spdcluster_helpers import log_warning, parallel_map
from .spdcluster_mean import MeanMethod, MeanSolverConfig, Metric, cluster_dispersion, compute_mean


def _check_labels(labels: Sequence[int], k: int, name: str) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise DimMismatch(f'{name} must be a 1-D label vector, got shape {arr.shape}')
    arr = arr.astype(int)
    bad = np.flatnonzero((arr < 0) | (arr >= k))
    if bad.size:
        raise LabelOutOfRange(f'{name}[{bad[0]}] = {arr[bad[0]]} is outside [0, {k})', index=int(bad[0]))
    return arr


def confusion_matrix(labels_true: Sequence[int], labels_pred: Sequence[int], k: int) -> np.ndarray:
    """Counts C[i, j] of points with true label i and predicted label j."""
    t = _check_labels(labels_true, k, 'labels_true')
    p = _check_labels(labels_pred, k, 'labels_pred')
    if len(t) != len(p):
        raise DimMismatch(f'label vectors differ in length: {len(t)} vs {len(p)}')
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (t, p), 1)
    return C


def _assignment_value(C: np.ndarray) -> int:
    if C.size == 0:
        return 0
    rows, cols = linear_sum_assignment(C, maximize=True)
    return int(C[rows, cols].sum())


def hungarian_align(labels_true: Sequence[int], labels_pred: Sequence[int],
                    k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Optimal matching of true clusters to predicted clusters.

    The permutation pi maximizes sum_i C[i, pi(i)]. Among several optima
    the lexicographically smallest pi is returned: each position takes the
    smallest predicted label that still admits an optimal completion.

    Returns:
        (pi, C) with C the unaligned confusion matrix
    """
    C = confusion_matrix(labels_true, labels_pred, k)
    best = _assignment_value(C)
    perm = np.empty(k, dtype=int)
    free = list(range(k))
    gained = 0
    for i in range(k):
        rest_rows = np.arange(i + 1, k)
        for j in free:
            cols = [c for c in free if c != j]
            tail = _assignment_value(C[np.ix_(rest_rows, cols)])
            if gained + int(C[i, j]) + tail == best:
                perm[i] = j
                gained += int(C[i, j])
                free.remove(j)
                break
    return perm, C


def aligned_confusion(C: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Reorder predicted columns so that the matched pairs lie on the diagonal."""
    return C[:, perm]


def accuracy(labels_true: Sequence[int], labels_pred: Sequence[int], k: int) -> float:
    """Fraction of points whose predicted cluster matches their true one after alignment."""
    perm, C = hungarian_align(labels_true, labels_pred, k)
    total = int(C.sum())
    if total == 0:
        raise DimMismatch('accuracy of an empty labeling is undefined')
    return float(np.trace(aligned_confusion(C, perm))) / total


@dataclass
class DispersionBreakdown:
    """Per-cluster terms of the total dispersion."""

    per_cluster: np.ndarray
    sizes: np.ndarray
    empty: List[int] = field(default_factory=list)

    @property
    def total(self) -> float:
        return float(np.sum(self.per_cluster))


def _coerce_enum(value, enum_cls):
    return value if isinstance(value, enum_cls) else enum_cls(str(value).lower())


def dispersion_breakdown(data: Sequence[np.ndarray], labels: Sequence[int], k: int,
                         metric: Metric = Metric.AFFINE,
                         mean_method: MeanMethod = MeanMethod.ICM,
                         mean_cfg: Optional[MeanSolverConfig] = None) -> DispersionBreakdown:
    """
    Mean squared distance of each cluster to its recomputed centroid.

    Empty clusters contribute zero and are listed in ``empty``.
    """
    Xs = np.asarray(data, dtype=float)
    lab = _check_labels(labels, k, 'labels')
    if Xs.ndim != 3 or len(Xs) != len(lab):
        raise DimMismatch(f'{len(lab)} labels for data of shape {Xs.shape}')
    metric = _coerce_enum(metric, Metric)
    mean_method = _coerce_enum(mean_method, MeanMethod)
    sizes = np.bincount(lab, minlength=k)

    def _one(j: int) -> float:
        members = Xs[lab == j]
        if len(members) == 0:
            return 0.0
        c = compute_mean(members, mean_method, metric, mean_cfg)
        return cluster_dispersion(members, c, metric)

    per_cluster = np.asarray(parallel_map(_one, list(range(k))), dtype=float)
    empty = [int(j) for j in np.flatnonzero(sizes == 0)]
    if empty:
        log_warning(f'clusters {empty} are empty and contribute zero dispersion')
    return DispersionBreakdown(per_cluster, sizes, empty)


def total_dispersion(data: Sequence[np.ndarray], labels: Sequence[int], k: int,
                     metric: Metric = Metric.AFFINE,
                     mean_method: MeanMethod = MeanMethod.ICM,
                     mean_cfg: Optional[MeanSolverConfig] = None) -> float:
    """Sum over clusters of the mean squared distance to the cluster centroid."""
    return dispersion_breakdown(data, labels, k, metric, mean_method, mean_cfg).total


def _ratio(pred: float, truth: float) -> float:
    if truth > 0.0:
        return pred / truth
    return 1.0 if pred == 0.0 else float('inf')


def normalized_dispersion(data: Sequence[np.ndarray], labels_pred: Sequence[int],
                          labels_true: Sequence[int], k: int,
                          metric: Metric = Metric.AFFINE,
                          mean_method: MeanMethod = MeanMethod.ICM,
                          mean_cfg: Optional[MeanSolverConfig] = None) -> float:
    """
    Total dispersion of the prediction over that of the ground truth.

    Values below one are possible: the truth need not minimize dispersion.
    """
    pred = total_dispersion(data, labels_pred, k, metric, mean_method, mean_cfg)
    truth = total_dispersion(data, labels_true, k, metric, mean_method, mean_cfg)
    return _ratio(pred, truth)


@dataclass
class EvalReport:
    """Scores of one predicted partition."""

    k: int
    totdisp: float
    metric: str
    mean_method: str
    accuracy: Optional[float] = None
    confusion: Optional[np.ndarray] = None
    assignment: Optional[np.ndarray] = None
    truth_totdisp: Optional[float] = None
    normalized_totdisp: Optional[float] = None
    empty_clusters: List[int] = field(default_factory=list)
    runtime_seconds: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'accuracy': self.accuracy,
            'confusion': None if self.confusion is None else self.confusion.tolist(),
            'assignment': None if self.assignment is None else self.assignment.tolist(),
            'totdisp': self.totdisp,
            'truth_totdisp': self.truth_totdisp,
            'normalized_totdisp': self.normalized_totdisp,
            'metric': self.metric,
            'mean_method': self.mean_method,
            'empty_clusters': self.empty_clusters,
            'runtime_seconds': self.runtime_seconds,
        }


def evaluate_partition(data: Sequence[np.ndarray], labels_pred: Sequence[int], k: int,
                       labels_true: Optional[Sequence[int]] = None,
                       metric: Metric = Metric.AFFINE,
                       mean_method: Optional[MeanMethod] = None,
                       mean_cfg: Optional[MeanSolverConfig] = None,
                       runtime_seconds: Optional[Dict[str, float]] = None) -> EvalReport:
    """
    Score a predicted labeling.

    Accuracy, the aligned confusion matrix and the normalized dispersion
    need ``labels_true``; without it only the total dispersion is filled.
    ``mean_method`` defaults to the configured ``eval_mean_method``.
    """
    metric = _coerce_enum(metric, Metric)
    mean_method = _coerce_enum(mean_method or get_config().eval_mean_method, MeanMethod)
    pred = dispersion_breakdown(data, labels_pred, k, metric, mean_method, mean_cfg)
    report = EvalReport(k=k, totdisp=pred.total, metric=metric.value, mean_method=mean_method.value,
                        empty_clusters=pred.empty, runtime_seconds=dict(runtime_seconds or {}))
    if labels_true is not None:
        perm, C = hungarian_align(labels_true, labels_pred, k)
        aligned = aligned_confusion(C, perm)
        report.accuracy = float(np.trace(aligned)) / max(int(C.sum()), 1)
        report.confusion = aligned
        report.assignment = perm
        report.truth_totdisp = total_dispersion(data, labels_true, k, metric, mean_method, mean_cfg)
        report.normalized_totdisp = _ratio(report.totdisp, report.truth_totdisp)
    return report
