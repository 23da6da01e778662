"""
k-means pipelines over SPD datasets.

IRC   Lloyd's algorithm with affine distances and gradient-descent means.
ARC   as IRC with Iterative Centroid Method means.
LEC   Euclidean k-means on log-matrix coordinates at a base point.
FMC   Euclidean k-means on Frechet-map images, centroids recovered by ICM.
"""

from abc import abstractmethod
from typing import Optional, Sequence

import numpy as np

from .spdcluster_basepipeline import BaseLloyd
from .spdcluster_embed import FrechetMapSpec, SymBasis, embed_dataset
from .spdcluster_errors import DimMismatch, SpdClusterError, TooFewPoints
from .spdcluster_helpers import derive_seed, parallel_map, stage_timer
from .spdcluster_kmeans import lloyd_euclid
from .spdcluster_manifold import (
    EXP,
    check_spd,
    dist_affine_many,
    log_stack,
    spectral_apply,
    sqrt_and_invsqrt,
)
from .spdcluster_mean import (
    MeanSolverConfig,
    frechet_mean_gd,
    frechet_mean_icm,
    shuffled_order,
)
from .spdcluster_partition import KMeansConfig, Partition


def _validated_stack(data: Sequence[np.ndarray]) -> np.ndarray:
    Xs = np.asarray(data, dtype=float)
    if Xs.ndim != 3 or Xs.shape[1] != Xs.shape[2]:
        raise DimMismatch(f'expected a stack of square matrices, got shape {Xs.shape}')
    for i, X in enumerate(Xs):
        try:
            check_spd(X)
        except SpdClusterError as e:
            raise e.attach_index(i)
    return Xs


class RiemannianLloyd(BaseLloyd):
    """Lloyd's algorithm under the affine-invariant distance."""

    name = 'riemannian'

    def __init__(self, data: np.ndarray):
        super().__init__(len(data))
        self.data = data

    def sq_distances(self, centroids: np.ndarray) -> np.ndarray:
        cols = parallel_map(lambda C: dist_affine_many(C, self.data) ** 2, list(centroids))
        return np.stack(cols, axis=1)

    def sq_distances_to_point(self, index: int) -> np.ndarray:
        return dist_affine_many(self.data[index], self.data) ** 2

    def point_as_centroid(self, index: int) -> np.ndarray:
        return self.data[index].copy()

    @abstractmethod
    def cluster_mean(self, members: np.ndarray, restart: int, iteration: int, j: int) -> np.ndarray:
        """Affine Frechet mean estimate of one cluster."""

    def update_centroids(self, labels: np.ndarray, k: int, restart: int, iteration: int) -> np.ndarray:
        def _one(j: int) -> np.ndarray:
            return self.cluster_mean(self.data[labels == j], restart, iteration, j)
        return np.stack(parallel_map(_one, list(range(k))))


class IntrinsicLloyd(RiemannianLloyd):
    name = 'IRC'

    def __init__(self, data: np.ndarray, mean_cfg: MeanSolverConfig):
        super().__init__(data)
        self.mean_cfg = mean_cfg
        self.unconverged_means = 0

    def cluster_mean(self, members, restart, iteration, j):
        res = frechet_mean_gd(members, self.mean_cfg, validate=False, warn=False)
        if not res.converged:
            self.unconverged_means += 1
        return res.mean


class ApproximateLloyd(RiemannianLloyd):
    name = 'ARC'

    def __init__(self, data: np.ndarray, icm_order_seed: Optional[int] = None):
        super().__init__(data)
        self.icm_order_seed = icm_order_seed

    def cluster_mean(self, members, restart, iteration, j):
        order = None
        if self.icm_order_seed is not None:
            order = shuffled_order(len(members), derive_seed(self.icm_order_seed, restart, iteration, j))
        return frechet_mean_icm(members, order, validate=False)


def cluster_irc(data: Sequence[np.ndarray], cfg: KMeansConfig,
                mean_cfg: Optional[MeanSolverConfig] = None) -> Partition:
    """
    Intrinsic Riemannian clustering.

    Seeds with k-means++ under the affine distance, assigns by affine
    distance and updates centroids by gradient-descent Frechet means.
    """
    Xs = _validated_stack(data)
    engine = IntrinsicLloyd(Xs, mean_cfg or MeanSolverConfig.from_config())
    part = engine.run(cfg)
    part.metadata.update({
        'totdisp_metric': 'affine',
        'centroid_method': 'gd',
        'unconverged_means': engine.unconverged_means,
        'timing': dict(engine.timings),
    })
    return part


def cluster_arc(data: Sequence[np.ndarray], cfg: KMeansConfig,
                icm_order_seed: Optional[int] = None) -> Partition:
    """
    Approximate Riemannian clustering: IRC with ICM centroid updates.

    Without ``icm_order_seed`` each cluster is folded in data order.
    """
    Xs = _validated_stack(data)
    engine = ApproximateLloyd(Xs, icm_order_seed)
    part = engine.run(cfg)
    part.metadata.update({
        'totdisp_metric': 'affine',
        'centroid_method': 'icm',
        'icm_order_seed': icm_order_seed,
        'timing': dict(engine.timings),
    })
    return part


def log_coordinates(data: np.ndarray, base_point: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Coordinates of log(B^-1/2 X B^-1/2) in the Sym(n) basis, shape (N, m).

    With B = Id these are the coordinates of log X, and Euclidean distances
    between them are log-Euclidean distances.
    """
    n = data.shape[1]
    if base_point is None:
        L = log_stack(data)
    else:
        _, isB = sqrt_and_invsqrt(check_spd(base_point))
        L = log_stack(isB @ data @ isB)
    return SymBasis(n).coords(L)


def cluster_lec(data: Sequence[np.ndarray], cfg: KMeansConfig,
                base_point: Optional[np.ndarray] = None) -> Partition:
    """
    Log-Euclidean clustering.

    Runs Euclidean k-means on log coordinates taken at ``base_point``
    (identity by default). Centroids come back both as m-vectors
    (``centroid_vectors``) and as SPD matrices B^1/2 exp(c) B^1/2.
    ``totdisp`` is the total dispersion in log coordinates.
    """
    Xs = _validated_stack(data)
    timings = {}
    with stage_timer('log_map', timings):
        V = log_coordinates(Xs, base_point)
    with stage_timer('kmeans', timings):
        part = lloyd_euclid(V, cfg)
    basis = SymBasis(Xs.shape[1])
    spd = [spectral_apply(basis.from_coords(c), EXP) for c in part.centroid_vectors]
    if base_point is not None:
        sB, _ = sqrt_and_invsqrt(check_spd(base_point))
        spd = [sB @ C @ sB for C in spd]
    part.centroids = np.stack(spd)
    part.metadata.update({
        'pipeline': 'LEC',
        'totdisp_metric': 'log_euclidean',
        'base_point': 'identity' if base_point is None else 'provided',
        'timing': timings,
    })
    return part


def cluster_fmc(data: Sequence[np.ndarray], spec: FrechetMapSpec, cfg: KMeansConfig) -> Partition:
    """
    Frechet-map clustering.

    Embeds the data with exactly N * l affine distances, runs Euclidean
    k-means in R^l and carries the labels back to the data points. The
    reported dispersion uses the affine metric with ICM centroids of the
    induced clusters, so it compares directly with the other pipelines.
    """
    Xs = _validated_stack(data)
    if Xs.shape[1:] != (spec.n, spec.n):
        raise DimMismatch(f'data shape {Xs.shape[1:]} does not match references ({spec.n}, {spec.n})')
    if len(Xs) < cfg.k:
        raise TooFewPoints(f'{len(Xs)} points cannot form {cfg.k} clusters')
    timings = {}
    with stage_timer('embed', timings):
        F = embed_dataset(spec, Xs)
    with stage_timer('kmeans', timings):
        part = lloyd_euclid(F, cfg)
    with stage_timer('centroids', timings):
        labels = part.labels
        centroids = np.stack(parallel_map(
            lambda j: frechet_mean_icm(Xs[labels == j], validate=False), list(range(cfg.k))))
        totdisp = 0.0
        for j in range(cfg.k):
            d = dist_affine_many(centroids[j], Xs[labels == j])
            totdisp += float(np.mean(d ** 2))
    euclid_totdisp = part.totdisp
    part.centroids = centroids
    part.totdisp = totdisp
    part.metadata.update({
        'pipeline': f'FMC{spec.p}',
        'p': spec.p,
        'n_refs': spec.ell,
        'distance_evaluations': len(Xs) * spec.ell,
        'totdisp_metric': 'affine',
        'centroid_method': 'icm',
        'embedded_totdisp': euclid_totdisp,
        'timing': timings,
    })
    return part
