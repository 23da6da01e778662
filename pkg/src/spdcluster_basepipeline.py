"""
Base Lloyd engine for spdcluster.

Provides the restart loop, k-means++ seeding, empty-cluster repair and
bookkeeping shared by every k-means pipeline. Subclasses supply the
squared distance and the centroid update of their space.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from .spdcluster_errors import TooFewPoints
from .spdcluster_helpers import derive_seed, log_debug, make_rng, parallel_map
from .spdcluster_partition import InitMethod, KMeansConfig, Partition


@dataclass
class RestartResult:
    labels: np.ndarray
    centroids: np.ndarray
    totdisp: float
    iterations: int
    converged: bool
    seed: int
    inertia_history: List[float] = field(default_factory=list)


class BaseLloyd(ABC):
    """
    Abstract base class for Lloyd-type k-means.

    Points are indexed 0..N-1; the engine only sees them through the
    distance, centroid and seeding hooks.
    """

    name = 'lloyd'

    def __init__(self, n_points: int):
        """Initialize the engine for a dataset of ``n_points`` points."""
        self.stamp_created = time.time()
        self.n_points = n_points
        self.timings: Dict[str, float] = {}

    @abstractmethod
    def sq_distances(self, centroids: np.ndarray) -> np.ndarray:
        """Squared distances of every point to every centroid, shape (N, k)."""

    @abstractmethod
    def sq_distances_to_point(self, index: int) -> np.ndarray:
        """Squared distances of every point to point ``index``, shape (N,)."""

    @abstractmethod
    def point_as_centroid(self, index: int) -> np.ndarray:
        """A centroid located at point ``index``."""

    @abstractmethod
    def update_centroids(self, labels: np.ndarray, k: int, restart: int, iteration: int) -> np.ndarray:
        """Centroids of the clusters given by ``labels``; every cluster is nonempty."""

    # --- shared machinery ---------------------------------------------------

    def kmeans_plusplus(self, k: int, rng: np.random.Generator) -> np.ndarray:
        """
        k-means++ seeding.

        The first seed is uniform; each next one is drawn with probability
        proportional to the squared distance to the nearest chosen seed.
        """
        N = self.n_points
        chosen = [int(rng.integers(N))]
        nearest = self.sq_distances_to_point(chosen[0])
        for _ in range(1, k):
            total = float(nearest.sum())
            if total > 0.0:
                idx = int(rng.choice(N, p=nearest / total))
            else:
                # all remaining mass sits on chosen seeds
                free = np.setdiff1d(np.arange(N), chosen)
                idx = int(rng.choice(free))
            chosen.append(idx)
            nearest = np.minimum(nearest, self.sq_distances_to_point(idx))
        return np.stack([self.point_as_centroid(i) for i in chosen])

    def _repair_empty(self, labels: np.ndarray, D: np.ndarray, centroids: np.ndarray, k: int) -> None:
        # an empty cluster seizes the point farthest from its own centroid
        for j in range(k):
            if np.any(labels == j):
                continue
            sizes = np.bincount(labels, minlength=k)
            own = D[np.arange(len(labels)), labels].copy()
            own[sizes[labels] <= 1] = -np.inf
            i = int(np.argmax(own))
            log_debug(f'{self.name}: cluster {j} empty, seizing point {i}')
            labels[i] = j
            centroids[j] = self.point_as_centroid(i)
            D[i, j] = 0.0

    def _restart(self, cfg: KMeansConfig, restart: int) -> RestartResult:
        seed = derive_seed(cfg.seed if cfg.seed is not None else 0, restart)
        rng = make_rng(seed)
        if cfg.init is InitMethod.PROVIDED:
            centroids = np.array(cfg.initial_centroids, dtype=float)
        else:
            centroids = self.kmeans_plusplus(cfg.k, rng)

        labels = None
        history: List[float] = []
        converged = False
        it = 0
        for it in range(1, cfg.max_iter + 1):
            D = self.sq_distances(centroids)
            new = np.argmin(D, axis=1)
            self._repair_empty(new, D, centroids, cfg.k)
            history.append(float(D[np.arange(len(new)), new].sum()))
            if labels is not None and np.array_equal(new, labels):
                converged = True
                break
            labels = new
            centroids = self.update_centroids(labels, cfg.k, restart, it)

        D = self.sq_distances(centroids)
        totdisp = self.total_dispersion(labels, D, cfg.k)
        return RestartResult(labels, centroids, totdisp, it, converged, seed, history)

    @staticmethod
    def total_dispersion(labels: np.ndarray, D: np.ndarray, k: int) -> float:
        """Sum over clusters of the mean squared distance to the centroid."""
        total = 0.0
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                total += float(D[mask, j].mean())
        return total

    def run(self, cfg: KMeansConfig) -> Partition:
        """
        Run all restarts and keep the one with the smallest total dispersion.

        Restarts run in parallel; each draws from its own seed derived from
        (cfg.seed, restart index), so the result does not depend on the
        number of workers. Ties go to the lowest restart index.
        """
        if self.n_points < cfg.k:
            raise TooFewPoints(f'{self.n_points} points cannot form {cfg.k} clusters')
        start = time.perf_counter()
        n_restarts = 1 if cfg.init is InitMethod.PROVIDED else cfg.restarts
        results = parallel_map(lambda r: self._restart(cfg, r), list(range(n_restarts)))
        best = min(range(len(results)), key=lambda r: (results[r].totdisp, r))
        res = results[best]
        self.timings['lloyd'] = self.timings.get('lloyd', 0.0) + time.perf_counter() - start
        log_debug(f'{self.name}: best restart {best} of {n_restarts}, totdisp {res.totdisp:.6g}')
        metadata: Dict[str, Any] = {
            'pipeline': self.name,
            'restarts': n_restarts,
            'seed': cfg.seed,
            'restart_seeds': [r.seed for r in results],
            'best_restart': best,
            'inertia_history': res.inertia_history,
        }
        return Partition(res.labels, cfg.k, res.centroids, res.totdisp, res.iterations,
                         res.converged, metadata=metadata)
