"""
Reference-point selection for Frechet-map clustering.

``select_random`` draws references from the dataset. ``select_principled``
pre-clusters with LEC, estimates each cluster's mean and radius, and
places two references per pair of clusters on the geodesic through the
two means: beyond the means for close pairs, between them for far pairs.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .spdcluster_errors import DegenerateClusters, SpdClusterError, TooFewPoints
from .spdcluster_helpers import derive_seed, log_verbose, log_warning, make_rng, parallel_map
from .spdcluster_manifold import check_spd, dist_affine, dist_affine_many, geodesic
from .spdcluster_mean import frechet_mean_icm
from .spdcluster_partition import KMeansConfig
from .spdcluster_pipelines import cluster_lec

COINCIDENT_MEANS_TOL = 1e-9


@dataclass
class PrincipledParams:
    """Placement parameters of the principled strategy."""

    t_close: float = 5.0
    t_far: float = 0.35
    n_rho: int = 50
    eps_d: float = 2.5
    quantile: float = 0.90
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.t_close > 1.0:
            raise ValueError(f't_close must exceed 1, got {self.t_close}')
        if not 0.0 <= self.t_far < 1.0:
            raise ValueError(f't_far must lie in [0, 1), got {self.t_far}')
        if self.n_rho < 1:
            raise ValueError(f'n_rho must be at least 1, got {self.n_rho}')
        if not self.eps_d > 0.0:
            raise ValueError(f'eps_d must be positive, got {self.eps_d}')
        if not 0.0 < self.quantile <= 1.0:
            raise ValueError(f'quantile must lie in (0, 1], got {self.quantile}')

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def _stack(data: Sequence[np.ndarray]) -> np.ndarray:
    return np.asarray(data, dtype=float)


def select_random_indices(n_points: int, ell: int, seed: Optional[int]) -> np.ndarray:
    """``ell`` distinct indices out of ``n_points``, deterministic per seed."""
    if ell > n_points:
        raise TooFewPoints(f'cannot pick {ell} references from {n_points} points')
    if ell < 1:
        raise ValueError(f'need at least one reference, got {ell}')
    return make_rng(seed).choice(n_points, size=ell, replace=False)


def select_random(data: Sequence[np.ndarray], ell: int, seed: Optional[int]) -> np.ndarray:
    """Uniformly sample ``ell`` distinct dataset points as references."""
    Xs = _stack(data)
    return Xs[select_random_indices(len(Xs), ell, seed)].copy()


def estimate_radius(cluster: Sequence[np.ndarray], mean: np.ndarray, n_rho: int,
                    quantile: float = 0.90, seed: Optional[int] = None) -> float:
    """
    Nearest-rank quantile of distances from the mean to cluster points.

    At most ``n_rho`` points are sampled without replacement; when the
    cluster is not larger than that, all points are used and the seed
    plays no role.
    """
    Xs = _stack(cluster)
    if Xs.ndim != 3 or len(Xs) == 0:
        raise ValueError('estimate_radius needs a nonempty cluster')
    size = min(int(n_rho), len(Xs))
    sample = Xs if size >= len(Xs) else Xs[make_rng(seed).choice(len(Xs), size=size, replace=False)]
    d = np.sort(dist_affine_many(np.asarray(mean, dtype=float), sample))
    rank = max(1, math.ceil(quantile * size - 1e-12))
    return float(d[rank - 1])


@dataclass
class PairPlacement:
    """Placement record of one unordered cluster pair."""

    i: int
    j: int
    distance: float
    ratio: float
    t: float
    case: str
    midpoint: np.ndarray = field(repr=False)
    ref_plus: np.ndarray = field(repr=False)
    ref_minus: np.ndarray = field(repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'i': self.i,
            'j': self.j,
            'distance': self.distance,
            'ratio': self.ratio,
            't': self.t,
            'case': self.case,
        }


@dataclass
class PrincipledReport:
    """Everything the principled strategy computed on its way to the references."""

    params: PrincipledParams
    k: int
    lec_labels: Optional[np.ndarray] = None
    means: List[np.ndarray] = field(default_factory=list)
    radii: List[float] = field(default_factory=list)
    pairs: List[PairPlacement] = field(default_factory=list)
    degenerate: bool = False
    fallback_reason: str = ''
    fallback_refs: int = 0

    @property
    def n_refs(self) -> int:
        """References actually returned, random ones included after a fallback."""
        return self.fallback_refs if self.degenerate else 2 * len(self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'strategy': 'random_fallback' if self.degenerate else 'principled',
            'params': self.params.to_dict(),
            'k': self.k,
            'lec_labels': None if self.lec_labels is None else self.lec_labels.tolist(),
            'means': [M.tolist() for M in self.means],
            'radii': list(self.radii),
            'pairs': [p.to_dict() for p in self.pairs],
            'n_refs': self.n_refs,
            'degenerate': self.degenerate,
            'fallback_reason': self.fallback_reason,
        }


def _place_pair(i: int, j: int, means: List[np.ndarray], radii: List[float],
                params: PrincipledParams) -> PairPlacement:
    Mi, Mj = means[i], means[j]
    d = dist_affine(Mi, Mj, validate=False)
    if d < COINCIDENT_MEANS_TOL:
        raise DegenerateClusters(f'cluster means {i} and {j} coincide (distance {d:.3e})')
    spread = radii[i] + radii[j]
    ratio = d / spread if spread > 0.0 else math.inf
    close = ratio < params.eps_d
    t = params.t_close if close else params.t_far
    mid = geodesic(Mi, Mj, 0.5, validate=False)
    # parameter s reaches M_j at s = 1, so |s| counts half-gaps from the midpoint
    plus = geodesic(mid, Mj, t, validate=False)
    minus = geodesic(mid, Mj, -t, validate=False)
    return PairPlacement(i, j, d, ratio, t, 'close' if close else 'far', mid, plus, minus)


def select_principled(data: Sequence[np.ndarray], k: int, params: Optional[PrincipledParams] = None,
                      kmeans_cfg: Optional[KMeansConfig] = None) -> Tuple[np.ndarray, PrincipledReport]:
    """
    Place k(k-1) references from approximate cluster structure.

    Steps: LEC pre-clustering; ICM mean of each cluster; radius as a
    sampled distance quantile; for every pair i < j, t = t_close when
    d(M_i, M_j) / (rho_i + rho_j) < eps_d and t_far otherwise; the two
    references sit at parameters +t and -t on the geodesic from the pair
    midpoint toward M_j.

    Falls back to random selection, flagged in the report, when a cluster
    is empty or two means coincide.

    Returns:
        (references stacked as (l, n, n), report)
    """
    params = params or PrincipledParams()
    Xs = _stack(data)
    if k < 2:
        raise ValueError(f'principled selection needs k >= 2, got {k}')
    if len(Xs) < k:
        raise TooFewPoints(f'{len(Xs)} points cannot form {k} clusters')
    for idx, X in enumerate(Xs):
        try:
            check_spd(X)
        except SpdClusterError as e:
            raise e.attach_index(idx)
    kmeans_cfg = kmeans_cfg or KMeansConfig.from_config(k, params.seed)
    report = PrincipledReport(params, k)

    try:
        lec = cluster_lec(Xs, kmeans_cfg)
        report.lec_labels = lec.labels
        members = [Xs[lec.labels == j] for j in range(k)]
        empty = [j for j, mem in enumerate(members) if len(mem) == 0]
        if empty:
            raise DegenerateClusters(f'pre-clustering left clusters {empty} empty')
        report.means = parallel_map(lambda mem: frechet_mean_icm(mem, validate=False), members)
        report.radii = [
            estimate_radius(members[j], report.means[j], params.n_rho, params.quantile,
                            derive_seed(params.seed if params.seed is not None else 0, j))
            for j in range(k)
        ]
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        report.pairs = parallel_map(lambda ij: _place_pair(ij[0], ij[1], report.means, report.radii, params), pairs)
    except DegenerateClusters as e:
        ell = min(k * (k - 1), len(Xs))
        log_warning(f'principled selection degenerate ({e}); using {ell} random references')
        report.degenerate = True
        report.fallback_reason = str(e)
        report.fallback_refs = ell
        report.pairs = []
        return select_random(Xs, ell, params.seed), report

    refs = np.stack([R for p in report.pairs for R in (p.ref_plus, p.ref_minus)])
    n_close = sum(1 for p in report.pairs if p.case == 'close')
    log_verbose(f'principled selection: {len(refs)} references, {n_close}/{len(report.pairs)} close pairs')
    return refs, report
