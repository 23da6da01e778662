"""
Property suites behind ``spdcluster diagnose``.

``diagnose_euclid`` exercises the Euclidean Frechet-map toolkit:
multilateration round trips, mirror solutions, separability of ball
images and the coherence condition against observed convexity.
``diagnose_spd`` checks the SPD geometry kernels on random instances and
the Frechet-map Jacobian against finite differences.

Each suite returns a JSON-ready dict with one entry per check and an
overall ``passed`` flag.
"""

import time
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .spdcluster_embed import (
    FrechetMapSpec, SymBasis, distortion_stats, embed, jacobian, local_rank, pushed_basis,
)
from .spdcluster_euclid import (
    EuclidRefs,
    embed_euclid,
    hyperplane_separable,
    invert_multilateration,
    midpoint_convexity_check,
    mutual_coherence,
    reflect_across_hull,
    sample_ball_euclid,
)
from .spdcluster_helpers import log_verbose, make_rng
from .spdcluster_manifold import (
    dist_affine,
    dist_log_euclidean,
    exp_map,
    geodesic,
    geodesic_log_euclidean,
    log_map,
    project_to_det,
)
from .spdcluster_synthgen import random_spd

SPD_SIZES = (2, 3, 5, 20)
GEOMETRY_TOL = 1e-8
JACOBIAN_TOL = 1e-5


def _timed(name: str, check: Callable[[], Dict[str, Any]], results: Dict[str, Any]) -> None:
    start = time.perf_counter()
    out = check()
    out['seconds'] = time.perf_counter() - start
    results[name] = out
    log_verbose(f'[{out["seconds"]:.5f}s] {name}: {"ok" if out["passed"] else "FAILED"}')


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


# --- Euclidean suite --------------------------------------------------------

def _random_refs(m: int, rng: np.random.Generator) -> EuclidRefs:
    while True:
        pts = rng.standard_normal((m, m)) * 3.0
        A = pts[:-1] - pts[-1]
        if m == 1 or np.linalg.matrix_rank(A) == m - 1:
            return EuclidRefs(pts, 2)


def check_multilateration(rng: np.random.Generator, instances: int = 100) -> Dict[str, Any]:
    """Invert the squared-distance map and compare with the true point and its mirror."""
    worst = worst_mirror = 0.0
    for _ in range(instances):
        m = int(rng.integers(2, 5))
        refs = _random_refs(m, rng)
        x = rng.standard_normal(m) * 2.0
        sols = invert_multilateration(refs, embed_euclid(refs, x)).solutions
        err = min(np.linalg.norm(s - x) for s in sols) / max(1.0, np.linalg.norm(x))
        worst = max(worst, err)
        if len(sols) == 2:
            mirror = reflect_across_hull(refs, x)
            worst_mirror = max(worst_mirror, min(np.linalg.norm(s - mirror) for s in sols)
                               / max(1.0, np.linalg.norm(mirror)))
    return {
        'instances': instances,
        'max_rel_error': worst,
        'max_mirror_error': worst_mirror,
        'passed': bool(worst < GEOMETRY_TOL and worst_mirror < GEOMETRY_TOL),
    }


def _halfspace_balls(refs: EuclidRefs, rng: np.random.Generator) -> Tuple[np.ndarray, float, np.ndarray, float]:
    origin = refs.points[-1]
    A = refs.points[:-1] - origin
    normal = np.cross(A[0], A[1])
    normal /= np.linalg.norm(normal)

    def _in_plane() -> np.ndarray:
        g = rng.standard_normal(3)
        return g - (g @ normal) * normal

    while True:
        r1, r2 = rng.uniform(0.3, 1.0, size=2)
        c1 = origin + _in_plane() + (r1 + rng.uniform(0.5, 3.0)) * normal
        c2 = origin + _in_plane() + (r2 + rng.uniform(0.5, 3.0)) * normal
        if np.linalg.norm(c1 - c2) > r1 + r2 + 0.1:
            return c1, r1, c2, r2


def check_separability(rng: np.random.Generator, pairs: int = 20, samples: int = 200) -> Dict[str, Any]:
    """Images of disjoint balls on one side of the reference plane are linearly separable in R^3."""
    separable = 0
    for _ in range(pairs):
        refs = _random_refs(3, rng)
        c1, r1, c2, r2 = _halfspace_balls(refs, rng)
        S1 = embed_euclid(refs, sample_ball_euclid(c1, r1, samples, rng))
        S2 = embed_euclid(refs, sample_ball_euclid(c2, r2, samples, rng))
        separable += hyperplane_separable(S1, S2)
    return {'pairs': pairs, 'samples_per_ball': samples, 'separable': separable,
            'passed': separable == pairs}


def check_coherence(rng: np.random.Generator, trials: int = 10) -> Dict[str, Any]:
    """
    Compare the coherence condition with midpoint convexity of the ball image.

    The condition is sufficient, not necessary: the check passes when every
    ball meeting it has a convex image.
    """
    records: List[Dict[str, Any]] = []
    for _ in range(trials):
        m = int(rng.integers(2, 4))
        refs = EuclidRefs(rng.standard_normal((m, m)) * 0.5 + 10.0 * np.eye(m), 2)
        center = np.zeros(m)
        radius = float(rng.uniform(0.2, 2.0))
        A = sample_ball_euclid(center, radius, 200, rng)
        coherence = mutual_coherence(refs, A, radius)
        convex = midpoint_convexity_check(refs, center, radius, 100, 50, rng)
        records.append({'m': m, 'radius': radius, **coherence.to_dict(), **convex.to_dict()})
    passed = all(r['all_inside'] for r in records if r['condition_holds'])
    return {'trials': records, 'passed': passed}


def diagnose_euclid(seed: int = 0) -> Dict[str, Any]:
    rng = make_rng(seed)
    results: Dict[str, Any] = {'suite': 'euclid', 'seed': seed}
    _timed('multilateration', lambda: check_multilateration(rng), results)
    _timed('separability', lambda: check_separability(rng), results)
    _timed('coherence', lambda: check_coherence(rng), results)
    results['passed'] = all(v['passed'] for v in results.values() if isinstance(v, dict))
    return results


# --- SPD suite --------------------------------------------------------------

def _random_pair(rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    n = int(rng.choice(SPD_SIZES))
    return random_spd(n, rng, rng.uniform(0.1, 2.0)), random_spd(n, rng, rng.uniform(0.1, 2.0))


def _commuting_pair(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    a, b = rng.uniform(-1.0, 1.0, size=(2, n))
    return (U * np.exp(a)) @ U.T, (U * np.exp(b)) @ U.T


def check_geometry(rng: np.random.Generator, instances: int = 500) -> Dict[str, Any]:
    """
    Metric axioms, invariances, round trips and geodesic speed, plus the
    determinant projection (distance, target determinant, minimality
    against another point of the slice) and agreement with the
    log-Euclidean geometry on commuting pairs.
    """
    worst = {'symmetry': 0.0, 'triangle_excess': 0.0, 'affine_invariance': 0.0,
             'inversion_isometry': 0.0, 'exp_log_round_trip': 0.0, 'geodesic_speed': 0.0,
             'project_to_det': 0.0, 'project_to_det_det': 0.0, 'project_to_det_excess': 0.0,
             'commuting_geodesic': 0.0, 'commuting_distance': 0.0}
    for _ in range(instances):
        P, Q = _random_pair(rng)
        n = P.shape[0]
        S = random_spd(n, rng, rng.uniform(0.1, 2.0))
        d = dist_affine(P, Q)
        worst['symmetry'] = max(worst['symmetry'], _rel(dist_affine(Q, P), d))
        worst['triangle_excess'] = max(worst['triangle_excess'],
                                       d - dist_affine(P, S) - dist_affine(S, Q))
        A = rng.standard_normal((n, n)) + n * np.eye(n)
        moved = dist_affine(A @ P @ A.T, A @ Q @ A.T)
        worst['affine_invariance'] = max(worst['affine_invariance'], _rel(moved, d))
        inv = dist_affine(np.linalg.inv(P), np.linalg.inv(Q))
        worst['inversion_isometry'] = max(worst['inversion_isometry'], _rel(inv, d))
        back = exp_map(P, log_map(P, Q))
        worst['exp_log_round_trip'] = max(worst['exp_log_round_trip'],
                                          np.linalg.norm(back - Q) / np.linalg.norm(Q))
        t = float(rng.uniform(-1.0, 2.0))
        worst['geodesic_speed'] = max(worst['geodesic_speed'],
                                      _rel(dist_affine(P, geodesic(P, Q, t)), abs(t) * d))
        r = float(np.exp(rng.uniform(-2.0, 2.0)))
        _, logdet = np.linalg.slogdet(P)
        expected = abs(np.log(r) - logdet) / np.sqrt(n)
        proj = project_to_det(P, r)
        worst['project_to_det'] = max(worst['project_to_det'], _rel(dist_affine(P, proj), expected))
        worst['project_to_det_det'] = max(worst['project_to_det_det'],
                                           abs(np.expm1(np.linalg.slogdet(proj)[1] - np.log(r))))
        # any other point on the same determinant slice is no closer
        other = project_to_det(S, r)
        worst['project_to_det_excess'] = max(worst['project_to_det_excess'],
                                              dist_affine(P, proj) - dist_affine(P, other))
        C, D = _commuting_pair(n, rng)
        G = geodesic(C, D, t)
        gap = np.linalg.norm(G - geodesic_log_euclidean(C, D, t)) / np.linalg.norm(G)
        worst['commuting_geodesic'] = max(worst['commuting_geodesic'], gap)
        worst['commuting_distance'] = max(worst['commuting_distance'],
                                           _rel(dist_log_euclidean(C, D), dist_affine(C, D)))
    return {
        'instances': instances,
        'max_errors': worst,
        'passed': all(value < GEOMETRY_TOL for value in worst.values()),
    }


def check_jacobian(rng: np.random.Generator, instances: int = 20, h: float = 1e-5) -> Dict[str, Any]:
    """Jacobian rows against central differences along the orthonormal frame at P."""
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(2, 4))
        p = int(rng.integers(1, 3))
        ell = int(rng.integers(1, 5))
        spec = FrechetMapSpec(np.stack([random_spd(n, rng, 1.5) for _ in range(ell)]), p)
        P = random_spd(n, rng, 1.0)
        basis = SymBasis(n)
        J = jacobian(spec, P, basis)
        fd = np.empty_like(J)
        for k, V in enumerate(pushed_basis(P, basis)):
            fd[:, k] = (embed(spec, exp_map(P, h * V)) - embed(spec, exp_map(P, -h * V))) / (2.0 * h)
        worst = max(worst, float(np.max(np.abs(fd - J)) / max(1.0, float(np.max(np.abs(J))))))
    return {'instances': instances, 'max_rel_error': worst, 'passed': worst < JACOBIAN_TOL}


def check_local_rank(rng: np.random.Generator, instances: int = 10) -> Dict[str, Any]:
    """With l = m generic references the squared map has full rank at generic points."""
    ranks = []
    for _ in range(instances):
        n = int(rng.integers(2, 4))
        m = n * (n + 1) // 2
        spec = FrechetMapSpec(np.stack([random_spd(n, rng, 1.5) for _ in range(m)]), 2)
        ranks.append({'n': n, 'm': m, 'rank': local_rank(spec, random_spd(n, rng, 0.5))})
    full = sum(1 for r in ranks if r['rank'] == r['m'])
    return {'instances': ranks, 'full_rank': full, 'passed': full == instances}


def check_distortion(rng: np.random.Generator) -> Dict[str, Any]:
    """Sampled Lipschitz ratios of both map orders stay under their bounds."""
    n = 3
    data = np.stack([random_spd(n, rng, rng.uniform(0.1, 1.0)) for _ in range(40)])
    refs = np.stack([random_spd(n, rng, 1.0) for _ in range(4)])
    out: Dict[str, Any] = {}
    for p in (1, 2):
        out[f'p{p}'] = distortion_stats(FrechetMapSpec(refs, p), data, 200, rng).to_dict()
    out['passed'] = all(out[f'p{p}']['lipschitz_bound_ok'] for p in (1, 2))
    return out


def diagnose_spd(seed: int = 0, instances: int = 500) -> Dict[str, Any]:
    rng = make_rng(seed)
    results: Dict[str, Any] = {'suite': 'spd', 'seed': seed}
    _timed('geometry', lambda: check_geometry(rng, instances), results)
    _timed('jacobian', lambda: check_jacobian(rng), results)
    _timed('local_rank', lambda: check_local_rank(rng), results)
    _timed('distortion', lambda: check_distortion(rng), results)
    results['passed'] = all(v['passed'] for v in results.values() if isinstance(v, dict))
    return results


SUITES = {'euclid': diagnose_euclid, 'spd': diagnose_spd}
