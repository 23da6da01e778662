"""
Clustering result and k-means configuration types.
"""

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .spdcluster_config import get_config


class InitMethod(enum.Enum):
    KMEANS_PP = 'kmeans++'
    PROVIDED = 'provided'


@dataclass
class KMeansConfig:
    """Parameters of Lloyd's algorithm and its restarts."""

    k: int
    restarts: int = 10
    max_iter: int = 100
    seed: Optional[int] = None
    init: InitMethod = InitMethod.KMEANS_PP
    initial_centroids: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f'k must be at least 1, got {self.k}')
        if self.restarts < 1:
            raise ValueError(f'restarts must be at least 1, got {self.restarts}')
        if self.max_iter < 1:
            raise ValueError(f'max_iter must be at least 1, got {self.max_iter}')
        if isinstance(self.init, str):
            self.init = InitMethod(self.init)
        if self.init is InitMethod.PROVIDED:
            if self.initial_centroids is None or len(self.initial_centroids) != self.k:
                raise ValueError('provided initialization needs exactly k initial centroids')

    @classmethod
    def from_config(cls, k: int, seed: Optional[int] = None) -> 'KMeansConfig':
        cfg = get_config()
        return cls(k=k, restarts=cfg.kmeans_restarts, max_iter=cfg.kmeans_max_iter, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'restarts': self.restarts,
            'max_iter': self.max_iter,
            'seed': self.seed,
            'init': self.init.value,
        }


@dataclass
class Partition:
    """
    Cluster labels with centroids and the total dispersion they achieve.

    ``centroids`` are vectors for Euclidean k-means and SPD matrices for the
    SPD pipelines; pipelines that cluster in a vector space also keep
    those centroids in ``centroid_vectors``.
    """

    labels: np.ndarray
    k: int
    centroids: np.ndarray
    totdisp: float
    iterations: int
    converged: bool
    centroid_vectors: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.k):
            raise ValueError('partition labels must lie in [0, k)')
        if self.totdisp < 0:
            raise ValueError('total dispersion must be nonnegative')

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def to_dict(self, include_centroids: bool = True) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            'k': self.k,
            'labels': self.labels.tolist(),
            'totdisp': self.totdisp,
            'iterations': self.iterations,
            'converged': self.converged,
            'metadata': self.metadata,
        }
        if include_centroids:
            d['centroids'] = np.asarray(self.centroids).tolist()
            if self.centroid_vectors is not None:
                d['centroid_vectors'] = np.asarray(self.centroid_vectors).tolist()
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'Partition':
        vectors = d.get('centroid_vectors')
        return cls(
            labels=np.asarray(d['labels'], dtype=int),
            k=int(d['k']),
            centroids=np.asarray(d.get('centroids', []), dtype=float),
            totdisp=float(d.get('totdisp', 0.0)),
            iterations=int(d.get('iterations', 0)),
            converged=bool(d.get('converged', False)),
            centroid_vectors=None if vectors is None else np.asarray(vectors, dtype=float),
            metadata=dict(d.get('metadata', {})),
        )
