"""
Euclidean k-means: the shared engine of the vector-space pipelines.
"""

from dataclasses import replace
from typing import Sequence

import numpy as np

from .spdcluster_basepipeline import BaseLloyd
from .spdcluster_errors import DimMismatch
from .spdcluster_partition import KMeansConfig, Partition


class EuclideanLloyd(BaseLloyd):
    """Lloyd's algorithm on the rows of a (N, d) array."""

    name = 'euclid'

    def __init__(self, points: np.ndarray):
        super().__init__(len(points))
        self.points = points

    def sq_distances(self, centroids: np.ndarray) -> np.ndarray:
        diff = self.points[:, None, :] - centroids[None, :, :]
        return np.einsum('ikd,ikd->ik', diff, diff)

    def sq_distances_to_point(self, index: int) -> np.ndarray:
        diff = self.points - self.points[index]
        return np.einsum('id,id->i', diff, diff)

    def point_as_centroid(self, index: int) -> np.ndarray:
        return self.points[index].copy()

    def update_centroids(self, labels: np.ndarray, k: int, restart: int, iteration: int) -> np.ndarray:
        counts = np.bincount(labels, minlength=k).astype(float)
        sums = np.zeros((k, self.points.shape[1]))
        np.add.at(sums, labels, self.points)
        return sums / counts[:, None]


def lloyd_euclid(points: Sequence[Sequence[float]], cfg: KMeansConfig) -> Partition:
    """
    Euclidean k-means with k-means++ seeding and restarts.

    Assignment ties go to the lowest cluster index. The returned partition
    is the restart with the smallest total dispersion; ``metadata`` holds
    the per-iteration inertia of that restart.

    Args:
        points: N vectors of one length (1-D input is read as N scalars)
        cfg: k, restarts, iteration cap and master seed

    Returns:
        Partition with vector centroids

    Raises:
        TooFewPoints: N < k
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimMismatch(f'expected an (N, d) array of vectors, got shape {X.shape}')
    if cfg.initial_centroids is not None:
        init = np.asarray(cfg.initial_centroids, dtype=float)
        if init.ndim == 1:
            cfg = replace(cfg, initial_centroids=init[:, None])
    part = EuclideanLloyd(X).run(cfg)
    part.centroid_vectors = part.centroids
    return part
