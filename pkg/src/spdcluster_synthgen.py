"""
Synthetic SPD benchmark data.

Datasets are unions of geodesic balls. ``gen_ball_config`` draws centers
whose normalized pairwise distances fall in a band; ``gen_mirror_config``
builds the four-ball configuration made of two nearby centers and their
inverses. Points are uniform in the exponential-chart tangent ball:
a metric-uniform direction and a radius rho * U^(1/m).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .spdcluster_errors import RetriesExhausted
from .spdcluster_helpers import derive_seed, log_debug, make_rng, parallel_map
from .spdcluster_manifold import EXP, check_spd, dist_affine, spectral_apply, sqrt_and_invsqrt

BALL_MEASURE = 'uniform in the exp-chart tangent ball (radius rho * U^(1/m))'


def random_symmetric(n: int, rng: np.random.Generator, norm: Optional[float] = None) -> np.ndarray:
    """(G + G^T)/2 for Gaussian G, optionally rescaled to a Frobenius norm."""
    G = rng.standard_normal((n, n))
    S = 0.5 * (G + G.T)
    if norm is not None:
        S *= norm / np.linalg.norm(S)
    return S


def random_symmetric_entries(n: int, rng: np.random.Generator, variance: float) -> np.ndarray:
    """Symmetric matrix whose upper-triangle entries are i.i.d. N(0, variance), mirrored."""
    S = np.zeros((n, n))
    iu = np.triu_indices(n)
    S[iu] = rng.normal(0.0, np.sqrt(variance), size=len(iu[0]))
    return S + np.triu(S, 1).T


def random_unit_direction(C: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Tangent vector at C of unit length for the affine-invariant metric."""
    sC, _ = sqrt_and_invsqrt(C)
    V = sC @ random_symmetric(C.shape[0], rng, 1.0) @ sC
    return 0.5 * (V + V.T)


def random_spd(n: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """exp of a random symmetric matrix of the given Frobenius norm."""
    return spectral_apply(random_symmetric(n, rng, norm), EXP)


def sample_ball(C: np.ndarray, rho: float, count: int, seed: Optional[int]) -> np.ndarray:
    """
    Sample ``count`` points of the geodesic ball B(C, rho).

    Each sample is exp_C(r V) with V a unit vector for the metric at C,
    taken from a symmetrized Gaussian, and r = rho * U^(1/m) for
    m = n(n+1)/2, so that points are uniform in the tangent ball.

    Returns:
        Stack of shape (count, n, n); every sample is within rho of C
    """
    C = check_spd(C)
    if not rho > 0:
        raise ValueError(f'ball radius must be positive, got {rho}')
    n = C.shape[0]
    m = n * (n + 1) // 2
    rng = make_rng(seed)
    G = rng.standard_normal((count, n, n))
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    S /= np.linalg.norm(S, axis=(1, 2))[:, None, None]
    r = rho * rng.uniform(size=count) ** (1.0 / m)
    w, U = np.linalg.eigh(S * r[:, None, None])
    E = (U * np.exp(w)[:, None, :]) @ np.swapaxes(U, -1, -2)
    sC, _ = sqrt_and_invsqrt(C)
    X = sC @ E @ sC
    return 0.5 * (X + np.swapaxes(X, -1, -2))


@dataclass
class BallConfig:
    """Parameters of a ball benchmark with constrained center separation."""

    k: int
    n: int
    samples_per_ball: int
    radius_range: Tuple[float, float] = (0.8, 1.2)
    d_low: float = 1.1
    d_up: float = 3.0
    center_scale: float = 2.0
    seed: Optional[int] = None
    max_retries: int = 10000

    def __post_init__(self):
        lo, hi = self.radius_range
        self.radius_range = (float(lo), float(hi))
        if not 0 < lo <= hi:
            raise ValueError(f'radius range must satisfy 0 < lo <= hi, got {self.radius_range}')
        if not 0 < self.d_low <= self.d_up:
            raise ValueError(f'ratio band must satisfy 0 < d_low <= d_up, got [{self.d_low}, {self.d_up}]')
        if self.samples_per_ball < 1 or self.k < 1 or self.n < 1:
            raise ValueError('k, n and samples_per_ball must be positive')

    def to_dict(self) -> Dict[str, Any]:
        d = dict(self.__dict__)
        d['radius_range'] = list(self.radius_range)
        d['generator'] = 'ball'
        return d


@dataclass
class MirrorConfig:
    """Provenance of a mirrored four-ball dataset."""

    n: int
    samples_per_ball: int
    norm: float = 12.0
    perturb_var: float = 0.1
    min_gap: float = 2.0
    seed: Optional[int] = None
    max_retries: int = 10000

    def to_dict(self) -> Dict[str, Any]:
        d = dict(self.__dict__)
        d['generator'] = 'mirror'
        return d


@dataclass
class LabeledDataset:
    """SPD points with ground-truth labels and the balls they came from."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None
    centers: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 0)))
    radii: np.ndarray = field(default_factory=lambda: np.zeros(0))
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if len(self.labels) != len(self.points):
                raise ValueError('labels and points differ in length')

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def k(self) -> int:
        if self.labels is None or not self.labels.size:
            return 0
        return int(self.labels.max()) + 1

    def __len__(self) -> int:
        return len(self.points)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return int(seed)
    return int(np.random.SeedSequence().entropy % (2 ** 63))


def _sample_balls(centers: List[np.ndarray], radii: List[float], per_ball: int,
                  seed: int) -> Tuple[np.ndarray, np.ndarray]:
    chunks = parallel_map(
        lambda i: sample_ball(centers[i], radii[i], per_ball, derive_seed(seed, 1, i)),
        list(range(len(centers))))
    labels = np.repeat(np.arange(len(centers)), per_ball)
    return np.concatenate(chunks), labels


def _ratio_violation(ratio: float, lo: float, hi: float) -> float:
    if ratio < lo:
        return lo - ratio
    if ratio > hi:
        return ratio - hi
    return 0.0


def gen_ball_config(cfg: BallConfig) -> LabeledDataset:
    """
    Rejection-sample k ball centers and radii, then sample the balls.

    Centers are exp(V) with V a Gaussian symmetric matrix scaled to
    ``center_scale``; a draw is kept when every pair satisfies
    d_low <= d(C_i, C_j) / (rho_i + rho_j) <= d_up.

    Raises:
        RetriesExhausted: no draw within max_retries; reports the pair
            that came closest to satisfying the band on the best draw
    """
    seed = _resolve_seed(cfg.seed)
    rng = make_rng(derive_seed(seed, 0))
    best: Tuple[float, Optional[Tuple[int, int]], float] = (np.inf, None, np.nan)
    for attempt in range(1, cfg.max_retries + 1):
        centers = [random_spd(cfg.n, rng, cfg.center_scale) for _ in range(cfg.k)]
        radii = list(rng.uniform(cfg.radius_range[0], cfg.radius_range[1], size=cfg.k))
        worst = (0.0, None, np.nan)
        for i in range(cfg.k):
            for j in range(i + 1, cfg.k):
                ratio = dist_affine(centers[i], centers[j], validate=False) / (radii[i] + radii[j])
                v = _ratio_violation(ratio, cfg.d_low, cfg.d_up)
                if v > worst[0]:
                    worst = (v, (i, j), ratio)
        if worst[1] is None:
            log_debug(f'ball centers accepted after {attempt} draws')
            break
        if worst[0] < best[0]:
            best = worst
    else:
        raise RetriesExhausted(
            f'no center draw met the ratio band [{cfg.d_low}, {cfg.d_up}] in {cfg.max_retries} tries; '
            f'tightest pair {best[1]} had ratio {best[2]:.4f}', pair=best[1], ratio=best[2])

    points, labels = _sample_balls(centers, radii, cfg.samples_per_ball, seed)
    provenance = cfg.to_dict()
    provenance.update({'seed': seed, 'center_draws': attempt, 'ball_measure': BALL_MEASURE})
    return LabeledDataset(points, labels, np.stack(centers), np.asarray(radii), provenance)


def gen_mirror_config(n: int, norm: float = 12.0, perturb_var: float = 0.1, min_gap: float = 2.0,
                      samples_per_ball: int = 500, seed: Optional[int] = None,
                      max_retries: int = 10000) -> LabeledDataset:
    """
    Four unit balls centered at C_1, C_2 and their inverses.

    C_1 = exp(V_1) with |V_1|_F = norm; C_2 = exp(V_1 + D) where D has
    entries of variance ``perturb_var``, redrawn until d(C_1, C_2) >
    min_gap; C_3 = C_1^-1 and C_4 = C_2^-1. Labels are 0..3 in that order.
    """
    if n < 2:
        raise ValueError(f'mirror configuration needs n >= 2, got {n}')
    seed = _resolve_seed(seed)
    rng = make_rng(derive_seed(seed, 0))
    V1 = random_symmetric(n, rng, norm)
    C1 = spectral_apply(V1, EXP)
    for attempt in range(1, max_retries + 1):
        V2 = V1 + random_symmetric_entries(n, rng, perturb_var)
        C2 = spectral_apply(V2, EXP)
        gap = dist_affine(C1, C2, validate=False)
        if gap > min_gap:
            break
    else:
        raise RetriesExhausted(f'no perturbation reached d(C_1, C_2) > {min_gap} in {max_retries} tries',
                               pair=(0, 1), ratio=gap)
    centers = [C1, C2, spectral_apply(-V1, EXP), spectral_apply(-V2, EXP)]
    radii = [1.0] * 4
    points, labels = _sample_balls(centers, radii, samples_per_ball, seed)
    provenance = MirrorConfig(n, samples_per_ball, norm, perturb_var, min_gap, seed, max_retries).to_dict()
    provenance.update({'perturbation_draws': attempt, 'gap': gap, 'ball_measure': BALL_MEASURE})
    return LabeledDataset(points, labels, np.stack(centers), np.asarray(radii), provenance)
