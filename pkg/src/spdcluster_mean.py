"""
Frechet means on SPD(n).

Two estimators: Riemannian gradient descent (the Karcher iteration when
eta = 0.5) and the Iterative Centroid Method, which folds points in one
at a time along geodesics.
"""

import enum
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .spdcluster_config import get_config
from .spdcluster_errors import DimMismatch, MaxIterExceeded, SpdClusterError
from .spdcluster_helpers import log_debug, make_rng, tree_sum
from .spdcluster_manifold import (
    EXP,
    check_spd,
    dist_affine_many,
    geodesic,
    log_euclidean_mean,
    log_stack,
    spectral_apply,
    sqrt_and_invsqrt,
)


class Metric(enum.Enum):
    AFFINE = 'affine'
    LOG_EUCLIDEAN = 'log_euclidean'


class MeanMethod(enum.Enum):
    GD = 'gd'
    ICM = 'icm'


@dataclass
class MeanSolverConfig:
    """Step size, stopping rule and start point of the gradient solver."""

    eta: float = 0.5
    grad_tol: float = 1e-8
    max_iter: int = 200
    init_point: Optional[np.ndarray] = None  # None starts at the first point

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f'eta must lie in (0, 1], got {self.eta}')
        if not self.grad_tol > 0.0:
            raise ValueError(f'grad_tol must be positive, got {self.grad_tol}')
        if self.max_iter < 1:
            raise ValueError(f'max_iter must be at least 1, got {self.max_iter}')

    @classmethod
    def from_config(cls) -> 'MeanSolverConfig':
        cfg = get_config()
        return cls(eta=cfg.eta, grad_tol=cfg.grad_tol, max_iter=cfg.mean_max_iter)


class MeanResult(NamedTuple):
    mean: np.ndarray
    iterations: int
    grad_norm: float
    converged: bool


def _as_stack(points: Sequence[np.ndarray], validate: bool = True) -> np.ndarray:
    Xs = np.asarray(points, dtype=float)
    if Xs.ndim != 3 or len(Xs) == 0 or Xs.shape[1] != Xs.shape[2]:
        raise DimMismatch('expected a nonempty list of equally sized square matrices')
    if validate:
        for i, X in enumerate(Xs):
            try:
                check_spd(X)
            except SpdClusterError as e:
                raise e.attach_index(i)
    return Xs


def mean_whitened_log(P: np.ndarray, Xs: np.ndarray) -> np.ndarray:
    """
    (1/N) sum log(P^-1/2 X_i P^-1/2), summed by a fixed pairwise tree.

    This is the mean of log_P(X_i) in the orthonormal frame at P.
    """
    _, isP = sqrt_and_invsqrt(P)
    logs = log_stack(isP @ Xs @ isP)
    return tree_sum(list(logs)) / len(Xs)


def frechet_mean_gd(points: Sequence[np.ndarray], cfg: Optional[MeanSolverConfig] = None,
                    validate: bool = True, warn: bool = True) -> MeanResult:
    """
    Frechet mean by Riemannian gradient descent.

    Iterates P <- exp_P(-eta g(P)) with g(P) = -(2/N) sum log_P(X_i) until
    the gradient norm at P drops below grad_tol. When max_iter is reached
    a MaxIterExceeded warning is issued and the iterate with the smallest
    gradient norm is returned with ``converged=False``.

    Args:
        points: Nonempty list of SPD matrices of one size
        cfg: Solver settings; global defaults when omitted
        validate: Check every point first
        warn: Issue MaxIterExceeded when the iteration budget runs out

    Returns:
        MeanResult(mean, iterations, grad_norm, converged)
    """
    cfg = cfg or MeanSolverConfig.from_config()
    Xs = _as_stack(points, validate)
    P = Xs[0].copy() if cfg.init_point is None else check_spd(cfg.init_point).copy()
    if P.shape != Xs.shape[1:]:
        raise DimMismatch(f'initial point shape {P.shape} does not match data {Xs.shape[1:]}')

    best_P, best_norm = P, np.inf
    for it in range(1, cfg.max_iter + 1):
        W = mean_whitened_log(P, Xs)
        # gradient in the frame at P is -2 W; its metric norm is 2 |W|_F
        grad_norm = 2.0 * float(np.linalg.norm(W))
        if grad_norm < best_norm:
            best_P, best_norm = P, grad_norm
        if grad_norm < cfg.grad_tol:
            log_debug(f'gradient descent converged in {it} iterations (|g| = {grad_norm:.3e})')
            return MeanResult(P, it, grad_norm, True)
        sP, _ = sqrt_and_invsqrt(P)
        E = spectral_apply(2.0 * cfg.eta * W, EXP)
        P = sP @ E @ sP
        P = 0.5 * (P + P.T)

    if warn:
        warnings.warn(MaxIterExceeded(
            f'gradient descent stopped after {cfg.max_iter} iterations (|g| = {best_norm:.3e})'))
    return MeanResult(best_P, cfg.max_iter, best_norm, False)


def identity_order(n_points: int) -> np.ndarray:
    """Visit points in data order."""
    return np.arange(n_points)


def shuffled_order(n_points: int, seed: Optional[int]) -> np.ndarray:
    """Seeded random visit order."""
    return make_rng(seed).permutation(n_points)


def frechet_mean_icm(points: Sequence[np.ndarray], order: Optional[Sequence[int]] = None,
                     validate: bool = True) -> np.ndarray:
    """
    Iterative Centroid Method.

    Starts at the first visited point and moves 1/(t+1) of the way toward
    the (t+1)-th visited point, for exactly N - 1 geodesic evaluations.
    """
    Xs = _as_stack(points, validate)
    N = len(Xs)
    order = identity_order(N) if order is None else np.asarray(order, dtype=int)
    if order.shape != (N,) or not np.array_equal(np.sort(order), np.arange(N)):
        raise ValueError('order must be a permutation of the point indices')
    P = Xs[order[0]].copy()
    for t in range(1, N):
        P = geodesic(P, Xs[order[t]], 1.0 / (t + 1), validate=False)
    return P


def cluster_dispersion(points: Sequence[np.ndarray], centroid: np.ndarray,
                       metric: Metric = Metric.AFFINE) -> float:
    """Mean squared distance from the points to the centroid."""
    Xs = _as_stack(points, validate=False)
    C = np.asarray(centroid, dtype=float)
    if C.shape != Xs.shape[1:]:
        raise DimMismatch(f'centroid shape {C.shape} does not match points {Xs.shape[1:]}')
    if metric is Metric.AFFINE:
        d = dist_affine_many(C, Xs)
        return float(np.mean(d ** 2))
    diff = log_stack(Xs) - log_stack(C[None])[0]
    return float(np.mean(np.sum(diff * diff, axis=(1, 2))))


def compute_mean(points: Sequence[np.ndarray], method: MeanMethod = MeanMethod.ICM,
                 metric: Metric = Metric.AFFINE,
                 mean_cfg: Optional[MeanSolverConfig] = None) -> np.ndarray:
    """
    Centroid of a cluster for the given metric.

    The log-Euclidean metric always uses its closed-form mean; the affine
    metric uses ``method``.
    """
    if metric is Metric.LOG_EUCLIDEAN:
        return log_euclidean_mean(points)
    if method is MeanMethod.GD:
        return frechet_mean_gd(points, mean_cfg, validate=False, warn=False).mean
    return frechet_mean_icm(points, validate=False)
