"""
Frechet-map embedding of SPD(n) into R^l.

A list of reference points R_1..R_l and an order p in {1, 2} define
F(X) = (d(R_1, X)^p, ..., d(R_l, X)^p). This module embeds points and
datasets, and provides the Riemannian Jacobian with its local-rank and
distortion diagnostics.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .spdcluster_config import get_config
from .spdcluster_errors import (
    AtReferencePoint,
    DimMismatch,
    SpdClusterError,
    TooFewPoints,
)
from .spdcluster_helpers import log_debug, parallel_map
from .spdcluster_manifold import (
    check_positive,
    check_spd,
    dist_affine,
    sqrt_and_invsqrt,
    whitened_log,
)


@dataclass(frozen=True)
class SymBasis:
    """
    Orthonormal basis of Sym(n) under the Frobenius inner product.

    Ordered as the diagonal units E_ii first, then (E_ij + E_ji)/sqrt(2)
    for i < j in row-major order.
    """

    n: int

    @property
    def m(self) -> int:
        return self.n * (self.n + 1) // 2

    def elements(self) -> np.ndarray:
        """All basis matrices, shape (m, n, n)."""
        return np.stack([self.from_coords(row) for row in np.eye(self.m)])

    def coords(self, S: np.ndarray) -> np.ndarray:
        """Coordinates of symmetric S (or a stack of them) in this basis."""
        S = np.asarray(S, dtype=float)
        iu = np.triu_indices(self.n, 1)
        diag = np.diagonal(S, axis1=-2, axis2=-1)
        off = np.sqrt(2.0) * S[..., iu[0], iu[1]]
        return np.concatenate([diag, off], axis=-1)

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if c.shape[-1] != self.m:
            raise DimMismatch(f'expected {self.m} coordinates, got {c.shape[-1]}')
        S = np.zeros(c.shape[:-1] + (self.n, self.n))
        idx = np.arange(self.n)
        S[..., idx, idx] = c[..., :self.n]
        iu = np.triu_indices(self.n, 1)
        off = c[..., self.n:] / np.sqrt(2.0)
        S[..., iu[0], iu[1]] = off
        S[..., iu[1], iu[0]] = off
        return S


def pushed_basis(P: np.ndarray, basis: SymBasis) -> np.ndarray:
    """Basis P^1/2 E_j P^1/2, orthonormal for the metric at P."""
    sP, _ = sqrt_and_invsqrt(check_spd(P))
    return np.stack([sP @ E @ sP for E in basis.elements()])


@dataclass(frozen=True, eq=False)
class FrechetMapSpec:
    """
    Reference points and order p of a Frechet map.

    References only need a positive spectrum: principled placements far
    out on a geodesic are badly conditioned yet valid.
    """

    refs: np.ndarray
    p: int = 2

    def __post_init__(self):
        refs = np.asarray(self.refs, dtype=float)
        if refs.ndim == 2:
            refs = refs[None]
        if refs.ndim != 3 or len(refs) < 1:
            raise DimMismatch('a Frechet map needs at least one reference matrix')
        if self.p not in (1, 2):
            raise ValueError(f'order p must be 1 or 2, got {self.p}')
        for i, R in enumerate(refs):
            try:
                check_positive(R)
            except SpdClusterError as e:
                raise e.attach_index(i)
        object.__setattr__(self, 'refs', refs)

    @property
    def n(self) -> int:
        return self.refs.shape[1]

    @property
    def ell(self) -> int:
        return self.refs.shape[0]


def _check_dim(spec: FrechetMapSpec, X: np.ndarray) -> None:
    if X.shape != (spec.n, spec.n):
        raise DimMismatch(f'point shape {X.shape} does not match references ({spec.n}, {spec.n})')


def _embed_validated(spec: FrechetMapSpec, X: np.ndarray) -> np.ndarray:
    d = np.array([dist_affine(R, X, validate=False) for R in spec.refs])
    return d ** spec.p


def embed(spec: FrechetMapSpec, X: np.ndarray) -> np.ndarray:
    """
    Embed one SPD matrix.

    Args:
        spec: Reference points and order
        X: SPD matrix of the references' dimension

    Returns:
        Length-l vector with entries d(R_i, X)^p
    """
    X = np.asarray(X, dtype=float)
    _check_dim(spec, X)
    check_spd(X)
    return _embed_validated(spec, X)


def embed_dataset(spec: FrechetMapSpec, data: Sequence[np.ndarray],
                  processes: Optional[int] = None) -> np.ndarray:
    """
    Embed every point of a dataset, preserving order.

    Exactly N * l affine distances are evaluated. Points are embedded in
    parallel; the output does not depend on the schedule.

    Returns:
        Array of shape (N, l)

    Raises:
        SpdClusterError: From the first failing point, with its index attached
    """
    Xs = np.asarray(data, dtype=float)
    if Xs.ndim != 3 or len(Xs) == 0:
        raise DimMismatch('embed_dataset needs a nonempty stack of matrices')
    for i, X in enumerate(Xs):
        try:
            _check_dim(spec, X)
            check_spd(X)
        except SpdClusterError as e:
            raise e.attach_index(i)

    def _one(i: int) -> np.ndarray:
        try:
            return _embed_validated(spec, Xs[i])
        except SpdClusterError as e:
            raise e.attach_index(i)

    rows = parallel_map(_one, list(range(len(Xs))), processes)
    log_debug(f'embedded {len(Xs)} points with {spec.ell} references (p={spec.p})')
    return np.vstack(rows)


def jacobian(spec: FrechetMapSpec, P: np.ndarray, basis: Optional[SymBasis] = None) -> np.ndarray:
    """
    Riemannian differential of the Frechet map at P.

    Row i holds the coordinates of the gradient -p d(R_i,P)^(p-2) log_P(R_i)
    in the basis pushed to P, i.e. the whitened logarithm
    log(P^-1/2 R_i P^-1/2) expanded against ``basis``.

    Returns:
        Matrix of shape (l, m)

    Raises:
        AtReferencePoint: p = 1 and P is within at_reference_tol of some R_i
    """
    P = check_spd(P)
    _check_dim(spec, P)
    basis = basis or SymBasis(spec.n)
    if basis.n != spec.n:
        raise DimMismatch(f'basis dimension {basis.n} does not match references {spec.n}')
    tol = get_config().at_reference_tol
    _, isP = sqrt_and_invsqrt(P)
    rows = []
    for i, R in enumerate(spec.refs):
        L = whitened_log(isP, R)
        if spec.p == 2:
            rows.append(-2.0 * basis.coords(L))
            continue
        d = float(np.linalg.norm(L))
        if d < tol:
            raise AtReferencePoint(f'point coincides with reference {i} (distance {d:.3e})')
        rows.append(-basis.coords(L) / d)
    return np.vstack(rows)


def local_rank(spec: FrechetMapSpec, P: np.ndarray, rank_tol: Optional[float] = None) -> int:
    """
    Numerical rank of the Jacobian at P.

    Singular values above rank_tol times the largest one are counted; a
    rank of m = n(n+1)/2 certifies local invertibility at P.
    """
    tol = get_config().rank_tol if rank_tol is None else rank_tol
    s = np.linalg.svd(jacobian(spec, P), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass
class DistortionReport:
    """Sampled Lipschitz diagnostics of a Frechet map."""

    max_ratio_inf: float
    lipschitz_bound_ok: bool
    bound: float
    delta: float
    n_pairs: int
    n_degenerate: int
    ratios: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_ratio_inf': self.max_ratio_inf,
            'lipschitz_bound_ok': self.lipschitz_bound_ok,
            'bound': self.bound,
            'delta': self.delta,
            'n_pairs': self.n_pairs,
            'n_degenerate': self.n_degenerate,
        }


def distortion_stats(spec: FrechetMapSpec, data: Sequence[np.ndarray], sample_pairs: int,
                     rng: np.random.Generator) -> DistortionReport:
    """
    Compare embedded and intrinsic distances over sampled pairs.

    For each pair the ratio ||F(x) - F(x')||_inf / d(x, x') is formed.
    The bound is p * 2^(p-1) * delta^(p-1), with delta the radius of a ball
    around the first data point that holds all data and references; for
    p = 1 it is 1. Pairs closer than ``degenerate_pair_tol`` are skipped
    and counted.
    """
    Xs = np.asarray(data, dtype=float)
    N = len(Xs)
    if N < 2:
        raise TooFewPoints(f'distortion_stats needs at least 2 points, got {N}')
    cfg = get_config()

    iu, ju = np.triu_indices(N, 1)
    take = min(int(sample_pairs), len(iu))
    chosen = np.sort(rng.choice(len(iu), size=take, replace=False))
    pairs = list(zip(iu[chosen], ju[chosen]))

    involved = sorted({int(i) for pair in pairs for i in pair})
    images = dict(zip(involved, embed_dataset(spec, Xs[involved])))

    ratios = []
    degenerate = 0
    for i, j in pairs:
        d = dist_affine(Xs[i], Xs[j], validate=False)
        if d < cfg.degenerate_pair_tol:
            degenerate += 1
            continue
        ratios.append(float(np.max(np.abs(images[i] - images[j]))) / d)
    ratios_arr = np.asarray(ratios)

    anchor = Xs[0]
    delta = max(max(dist_affine(anchor, R, validate=False) for R in spec.refs),
                max(dist_affine(anchor, X, validate=False) for X in Xs))
    p = spec.p
    bound = p * 2.0 ** (p - 1) * delta ** (p - 1)
    max_ratio = float(ratios_arr.max()) if ratios_arr.size else 0.0
    return DistortionReport(
        max_ratio_inf=max_ratio,
        lipschitz_bound_ok=bool(max_ratio <= bound + cfg.lipschitz_slack),
        bound=bound,
        delta=delta,
        n_pairs=len(ratios),
        n_degenerate=degenerate,
        ratios=ratios_arr,
    )
