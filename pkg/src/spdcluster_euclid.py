"""
Euclidean Frechet maps and their inversion.

In R^m with l = m affinely independent references, the squared-distance
map is two-to-one: a point and its mirror image across the affine hull
of the references share an image. This module inverts the map, tests
image membership, and measures coherence and separability of images.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .spdcluster_errors import (
    DegenerateRefs,
    DimMismatch,
    NoSolution,
    RefTouchesSet,
)

SOLUTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EuclidRefs:
    """Reference points in R^m, stored as rows, with the map order p."""

    points: np.ndarray
    p: int = 2

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if len(pts) < 1 or not np.all(np.isfinite(pts)):
            raise ValueError('references must be a nonempty set of finite points')
        if self.p not in (1, 2):
            raise ValueError(f'order p must be 1 or 2, got {self.p}')
        object.__setattr__(self, 'points', pts)

    @property
    def m(self) -> int:
        return self.points.shape[1]

    @property
    def ell(self) -> int:
        return self.points.shape[0]


def embed_euclid(refs: EuclidRefs, x: np.ndarray) -> np.ndarray:
    """(||x - r_1||^p, ..., ||x - r_l||^p); a stack of points maps row-wise."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != refs.m:
        raise DimMismatch(f'point dimension {x.shape[-1]} does not match references ({refs.m})')
    diff = x[..., None, :] - refs.points
    sq = np.sum(diff * diff, axis=-1)
    return sq if refs.p == 2 else np.sqrt(sq)


@dataclass
class MultilaterationResult:
    """Preimages of a squared-distance vector."""

    solutions: List[np.ndarray]
    gram: np.ndarray
    s_squared: float
    foot: np.ndarray
    normal: np.ndarray


@dataclass
class _Frame:
    origin: np.ndarray  # r_m
    A: np.ndarray  # rows r_i - r_m, i < m
    gram: np.ndarray
    u: np.ndarray
    alpha: np.ndarray
    quad: float  # u^T G^-1 u


def _frame(refs: EuclidRefs, d: np.ndarray) -> _Frame:
    if refs.ell != refs.m:
        raise DimMismatch(f'inversion needs exactly m = {refs.m} references, got {refs.ell}')
    d = np.asarray(d, dtype=float)
    if d.shape != (refs.m,):
        raise DimMismatch(f'distance vector must have length {refs.m}')
    origin = refs.points[-1]
    A = refs.points[:-1] - origin
    G = A @ A.T
    if len(G):
        w = np.linalg.eigvalsh(G)
        if w[0] <= 1e-12 * max(1.0, float(w[-1])):
            raise DegenerateRefs('references are not affinely independent')
    z = d[:-1] - d[-1]
    b = np.sum(A * A, axis=1)
    u = 0.5 * (b - z)
    alpha = scipy.linalg.solve(G, u, assume_a='pos') if len(G) else np.zeros(0)
    return _Frame(origin, A, G, u, alpha, float(u @ alpha))


def _unit_normal(A: np.ndarray, m: int) -> np.ndarray:
    if m == 1:
        return np.ones(1)
    n = scipy.linalg.null_space(A)[:, 0]
    n = n / np.linalg.norm(n)
    lead = np.flatnonzero(np.abs(n) > 1e-12)
    if lead.size and n[lead[0]] < 0:
        n = -n
    return n


def invert_multilateration(refs: EuclidRefs, d: np.ndarray) -> MultilaterationResult:
    """
    Recover the points whose squared distances to the references are d.

    The last reference is translated to the origin; the foot point in the
    affine hull is sum(alpha_i (r_i - r_m)) + r_m with alpha = G^-1 u, and
    the preimages are foot +/- s n with s^2 = d_m - u^T G^-1 u.

    Raises:
        DegenerateRefs: Gram matrix is not positive definite
        NoSolution: s^2 below -1e-9
    """
    if refs.p != 2:
        raise ValueError('multilateration inverts the squared-distance map (p = 2)')
    fr = _frame(refs, d)
    d_m = float(np.asarray(d, dtype=float)[-1])
    s2 = d_m - fr.quad
    foot = fr.alpha @ fr.A + fr.origin if len(fr.A) else fr.origin.copy()
    normal = _unit_normal(fr.A, refs.m)
    if s2 < -SOLUTION_TOL:
        raise NoSolution(f'distance vector is outside the image (s^2 = {s2:.3e})')
    if s2 <= SOLUTION_TOL:
        solutions = [foot]
    else:
        s = np.sqrt(s2)
        solutions = [foot + s * normal, foot - s * normal]
    return MultilaterationResult(solutions, fr.gram, s2, foot, normal)


def paraboloid_membership(refs: EuclidRefs, d: np.ndarray) -> bool:
    """True iff u^T G^-1 u <= d_m + 1e-9, i.e. d lies in the map's image."""
    fr = _frame(refs, d)
    return bool(fr.quad <= float(np.asarray(d)[-1]) + SOLUTION_TOL)


def reflect_across_hull(refs: EuclidRefs, x: np.ndarray) -> np.ndarray:
    """Mirror image of x across the affine hull of m references."""
    origin = refs.points[-1]
    normal = _unit_normal(refs.points[:-1] - origin, refs.m)
    x = np.asarray(x, dtype=float)
    return x - 2.0 * ((x - origin) @ normal) * normal


@dataclass
class CoherenceReport:
    mu: float
    dist_to_set: float
    threshold: float
    rho: Optional[float] = None
    condition_holds: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def mutual_coherence(refs: EuclidRefs, A: np.ndarray, rho: Optional[float] = None) -> CoherenceReport:
    """
    Largest |<(x - r_i)/|x - r_i|, (x - r_j)/|x - r_j|>| over x in A, i != j.

    With a ball radius ``rho`` the report also states whether
    rho / d(r, A) < (1 - (m - 1) mu) / sqrt(m), d(r, A) being the smallest
    reference-to-set distance.

    Raises:
        RefTouchesSet: some reference is within 1e-12 of a point of A
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != refs.m:
        raise DimMismatch(f'set dimension {A.shape[1]} does not match references ({refs.m})')
    diff = A[:, None, :] - refs.points[None, :, :]
    norms = np.linalg.norm(diff, axis=-1)
    if np.any(norms <= 1e-12):
        raise RefTouchesSet('a reference point lies on the evaluated set')
    units = diff / norms[..., None]
    mu = 0.0
    if refs.ell > 1:
        gram = np.abs(np.einsum('aik,ajk->aij', units, units))
        off = ~np.eye(refs.ell, dtype=bool)
        mu = float(np.max(gram[:, off]))
    mu = min(mu, 1.0)
    dist = float(norms.min())
    threshold = (1.0 - (refs.m - 1) * mu) / np.sqrt(refs.m)
    holds = None if rho is None else bool(rho / dist < threshold)
    return CoherenceReport(mu, dist, float(threshold), rho, holds)


def hyperplane_separable(S1: np.ndarray, S2: np.ndarray) -> bool:
    """
    Decide strict linear separability of two finite point sets.

    Solves the feasibility LP w.x - c <= -1 on S1 and w.x - c >= 1 on S2;
    any strictly separating (w, c) can be rescaled to this unit margin.
    """
    S1 = np.atleast_2d(np.asarray(S1, dtype=float))
    S2 = np.atleast_2d(np.asarray(S2, dtype=float))
    if S1.shape[1] != S2.shape[1]:
        raise DimMismatch(f'set dimensions differ: {S1.shape[1]} vs {S2.shape[1]}')
    if len(S1) == 0 or len(S2) == 0:
        raise ValueError('both sets must be nonempty')
    m = S1.shape[1]
    A_ub = np.vstack([
        np.hstack([S1, -np.ones((len(S1), 1))]),
        np.hstack([-S2, np.ones((len(S2), 1))]),
    ])
    b_ub = -np.ones(len(S1) + len(S2))
    res = linprog(np.zeros(m + 1), A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * (m + 1), method='highs')
    return res.status == 0


def in_convex_hull(points: np.ndarray, x: np.ndarray) -> bool:
    """True iff x is a convex combination of the rows of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float)
    if P.shape[1] != x.shape[0]:
        raise DimMismatch('point dimension does not match the hull')
    k = len(P)
    A_eq = np.vstack([P.T, np.ones((1, k))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method='highs')
    return res.status == 0


def sample_ball_euclid(center: np.ndarray, radius: float, count: int,
                       rng: np.random.Generator, boundary: bool = False) -> np.ndarray:
    """Uniform samples in (or on the boundary of) a Euclidean ball."""
    center = np.asarray(center, dtype=float)
    m = center.shape[0]
    g = rng.standard_normal((count, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = np.full(count, radius) if boundary else radius * rng.uniform(size=count) ** (1.0 / m)
    return center + g * r[:, None]


@dataclass
class ConvexityCheck:
    """Outcome of a pairwise-midpoint convexity check on the image of a ball."""

    n_midpoints: int
    n_in_hull: int
    n_in_paraboloid: int
    n_preimage_in_ball: int
    failures: List[int] = field(default_factory=list)

    @property
    def all_inside(self) -> bool:
        return self.n_midpoints == self.n_preimage_in_ball == self.n_in_paraboloid == self.n_in_hull

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_midpoints': self.n_midpoints,
            'n_in_hull': self.n_in_hull,
            'n_in_paraboloid': self.n_in_paraboloid,
            'n_preimage_in_ball': self.n_preimage_in_ball,
            'all_inside': self.all_inside,
        }


def midpoint_convexity_check(refs: EuclidRefs, center: np.ndarray, radius: float,
                             n_samples: int, n_pairs: int,
                             rng: np.random.Generator) -> ConvexityCheck:
    """
    Test whether the image of a ball under the map is convex.

    Boundary points of the ball are mapped; for random pairs the midpoint
    of the two images is tested for hull membership among the sampled
    images, for paraboloid membership, and for having a preimage inside
    the ball (found by multilateration on the squared distances). Requires
    l = m references.
    """
    sq_refs = EuclidRefs(refs.points, 2)
    boundary = sample_ball_euclid(center, radius, n_samples, rng, boundary=True)
    images = embed_euclid(refs, boundary)
    in_hull = in_parab = in_ball = 0
    failures: List[int] = []
    for t in range(n_pairs):
        i, j = rng.choice(len(images), size=2, replace=False)
        mid = 0.5 * (images[i] + images[j])
        sq = mid if refs.p == 2 else mid ** 2
        ok = True
        if in_convex_hull(images, mid):
            in_hull += 1
        else:
            ok = False
        if paraboloid_membership(sq_refs, sq):
            in_parab += 1
            try:
                sols = invert_multilateration(sq_refs, sq).solutions
            except NoSolution:
                sols = []
            slack = SOLUTION_TOL * max(1.0, radius) + 1e-7 * radius
            if any(np.linalg.norm(x - center) <= radius + slack for x in sols):
                in_ball += 1
            else:
                ok = False
        else:
            ok = False
        if not ok:
            failures.append(t)
    return ConvexityCheck(n_pairs, in_hull, in_parab, in_ball, failures)
