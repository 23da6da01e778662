"""
Geometry of SPD(n) under the affine-invariant metric.

All matrix functions go through the symmetric eigendecomposition
S = U diag(w) U^T, so fractional powers, logarithms and exponentials share
one kernel. Inputs are validated, never silently symmetrized; use
``symmetrize`` at ingestion time.
"""

import enum
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg

from .spdcluster_config import get_config
from .spdcluster_errors import (
    DimMismatch,
    EigenFailure,
    NotPositiveDefinite,
    NotSymmetric,
)


class SpectralKind(enum.Enum):
    EXP = 'exp'
    LOG = 'log'
    SQRT = 'sqrt'
    INVSQRT = 'invsqrt'
    POWER = 'power'


@dataclass(frozen=True)
class SpectralFn:
    """A scalar function applied to the eigenvalues of a symmetric matrix."""

    kind: SpectralKind
    t: float = 1.0

    @classmethod
    def power(cls, t: float) -> 'SpectralFn':
        return cls(SpectralKind.POWER, float(t))

    @property
    def requires_spd(self) -> bool:
        return self.kind is not SpectralKind.EXP

    def __call__(self, w: np.ndarray) -> np.ndarray:
        if self.kind is SpectralKind.EXP:
            return np.exp(w)
        if self.kind is SpectralKind.LOG:
            return np.log(w)
        if self.kind is SpectralKind.SQRT:
            return np.sqrt(w)
        if self.kind is SpectralKind.INVSQRT:
            return 1.0 / np.sqrt(w)
        return np.power(w, self.t)


EXP = SpectralFn(SpectralKind.EXP)
LOG = SpectralFn(SpectralKind.LOG)
SQRT = SpectralFn(SpectralKind.SQRT)
INVSQRT = SpectralFn(SpectralKind.INVSQRT)


# --- validation -----------------------------------------------------------

def _check_square(S: np.ndarray) -> None:
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimMismatch(f'expected a square matrix, got shape {S.shape}')


def _check_pair(P: np.ndarray, Q: np.ndarray) -> None:
    _check_square(P)
    if P.shape != Q.shape:
        raise DimMismatch(f'shape mismatch: {P.shape} vs {Q.shape}')


def symmetrize(S: np.ndarray) -> np.ndarray:
    """Return 0.5 * (S + S^T)."""
    S = np.asarray(S, dtype=float)
    return 0.5 * (S + S.T)


def check_symmetric(S: np.ndarray) -> np.ndarray:
    """
    Validate that S is a finite symmetric matrix.

    Asymmetry is measured as ||S - S^T||_F / ||S||_F against ``sym_tol``.

    Returns:
        S as a float ndarray

    Raises:
        DimMismatch: S is not square
        NotSymmetric: asymmetry above tolerance or non-finite entries
    """
    S = np.asarray(S, dtype=float)
    _check_square(S)
    if not np.all(np.isfinite(S)):
        raise NotSymmetric('matrix has non-finite entries')
    scale = np.linalg.norm(S)
    if scale > 0.0:
        asym = np.linalg.norm(S - S.T) / scale
        if asym > get_config().sym_tol:
            raise NotSymmetric(f'relative asymmetry {asym:.3e} exceeds sym_tol')
    return S


def _eigh(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        w, U = scipy.linalg.eigh(S)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenFailure(f'eigendecomposition failed: {e}') from e
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(U))):
        raise EigenFailure('eigendecomposition produced non-finite values')
    return w, U


def _check_eigenvalues_pd(w: np.ndarray) -> None:
    floor = get_config().pd_tol * max(float(np.max(np.abs(w))), 1.0)
    if w[0] <= floor:
        raise NotPositiveDefinite(
            f'matrix is not positive definite (min eigenvalue {w[0]:.6e})',
            min_eigenvalue=float(w[0]))


# Matrices built inside the kernels (geodesic points, means, whitened
# congruences) are SPD by construction; only the sign is checked.
def _check_eigenvalues_positive(w: np.ndarray) -> None:
    if not w[0] > 0.0:
        raise NotPositiveDefinite(
            f'matrix is not positive definite (min eigenvalue {w[0]:.6e})',
            min_eigenvalue=float(w[0]))


def check_spd(P: np.ndarray) -> np.ndarray:
    """
    Validate that P is symmetric positive definite.

    Raises:
        NotSymmetric, NotPositiveDefinite, EigenFailure
    """
    P = check_symmetric(P)
    try:
        w = scipy.linalg.eigvalsh(P)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenFailure(f'eigenvalue computation failed: {e}') from e
    _check_eigenvalues_pd(w)
    return P


def check_positive(P: np.ndarray) -> np.ndarray:
    """
    Validate a derived matrix: symmetric with a strictly positive spectrum.

    Unlike check_spd there is no floor relative to the largest eigenvalue,
    so points far out on a geodesic pass however ill-conditioned they are.

    Raises:
        NotSymmetric, NotPositiveDefinite, EigenFailure
    """
    P = check_symmetric(P)
    try:
        w = scipy.linalg.eigvalsh(P)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenFailure(f'eigenvalue computation failed: {e}') from e
    _check_eigenvalues_positive(w)
    return P


# --- spectral kernel ------------------------------------------------------

def spectral_apply(S: np.ndarray, f: SpectralFn) -> np.ndarray:
    """
    Apply a spectral function: U f(Lambda) U^T.

    Args:
        S: Symmetric matrix (SPD unless f is EXP)
        f: Spectral function

    Returns:
        Symmetric matrix; SPD for EXP, SQRT, INVSQRT and POWER
    """
    S = check_symmetric(S)
    w, U = _eigh(S)
    if f.requires_spd:
        _check_eigenvalues_pd(w)
    return _rebuild(U, f(w))


def _rebuild(U: np.ndarray, fw: np.ndarray) -> np.ndarray:
    A = (U * fw) @ U.T
    return 0.5 * (A + A.T)


def sqrt_and_invsqrt(P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """P^{1/2} and P^{-1/2} from a single eigendecomposition."""
    w, U = _eigh(P)
    _check_eigenvalues_positive(w)
    s = np.sqrt(w)
    return _rebuild(U, s), _rebuild(U, 1.0 / s)


def _congruence(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    # A X A for symmetric A, symmetrized against rounding
    M = A @ X @ A
    return 0.5 * (M + M.T)


# --- metric ---------------------------------------------------------------

def inner_at(P: np.ndarray, V: np.ndarray, W: np.ndarray) -> float:
    """Affine-invariant inner product Tr(P^-1 V P^-1 W)."""
    P = np.asarray(P, dtype=float)
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    _check_pair(P, V)
    _check_pair(P, W)
    check_spd(P)
    try:
        A = scipy.linalg.solve(P, V, assume_a='pos')
        B = scipy.linalg.solve(P, W, assume_a='pos')
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f'cannot factor base point: {e}') from e
    return float(np.trace(A @ B))


def dist_affine(P: np.ndarray, Q: np.ndarray, validate: bool = True) -> float:
    """
    Affine-invariant distance sqrt(Tr(log(P^-1/2 Q P^-1/2)^2)).

    Computed from the generalized eigenvalues of (Q, P), which are the
    eigenvalues of P^-1 Q.

    Args:
        P, Q: SPD matrices of equal shape
        validate: Check both inputs first; pass False for data that was
            validated on ingestion

    Returns:
        Distance, exactly 0.0 when P and Q are entrywise equal
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _check_pair(P, Q)
    if validate:
        check_spd(P)
        check_spd(Q)
    if np.array_equal(P, Q):
        return 0.0
    try:
        w = scipy.linalg.eigvalsh(Q, P)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotPositiveDefinite(f'generalized eigenproblem failed: {e}') from e
    if w[0] <= 0.0:
        raise NotPositiveDefinite('second argument is not positive definite',
                                  min_eigenvalue=float(w[0]))
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def dist_affine_many(P: np.ndarray, Xs: np.ndarray) -> np.ndarray:
    """
    Distances from P to every matrix of a stack, shape (N, n, n) -> (N,).

    Inputs are assumed validated. Rows equal to P get exactly 0.
    """
    Xs = np.asarray(Xs, dtype=float)
    if Xs.ndim != 3 or Xs.shape[1:] != P.shape:
        raise DimMismatch(f'expected a stack of {P.shape} matrices, got {Xs.shape}')
    _, isP = sqrt_and_invsqrt(P)
    M = isP @ Xs @ isP
    M = 0.5 * (M + np.swapaxes(M, -1, -2))
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as e:
        raise EigenFailure(f'batched eigenvalue computation failed: {e}') from e
    if np.any(w[:, 0] <= 0.0):
        bad = int(np.argmax(w[:, 0] <= 0.0))
        raise NotPositiveDefinite('matrix is not positive definite',
                                  min_eigenvalue=float(w[bad, 0]), index=bad)
    d = np.sqrt(np.sum(np.log(w) ** 2, axis=1))
    same = np.all(Xs == P, axis=(1, 2))
    d[same] = 0.0
    return d


def geodesic(P: np.ndarray, Q: np.ndarray, t: float, validate: bool = True) -> np.ndarray:
    """
    Point at parameter t on the geodesic from P (t=0) to Q (t=1).

    P^1/2 (P^-1/2 Q P^-1/2)^t P^1/2. Any real t is accepted; values outside
    [0, 1] extend the geodesic beyond its endpoints.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _check_pair(P, Q)
    if validate:
        check_spd(P)
        check_spd(Q)
    if t == 0.0 or np.array_equal(P, Q):
        return P.copy()
    if t == 1.0:
        return Q.copy()
    sP, isP = sqrt_and_invsqrt(P)
    w, U = _eigh(_congruence(isP, Q))
    _check_eigenvalues_positive(w)
    return _congruence(sP, _rebuild(U, np.power(w, t)))


def exp_map(P: np.ndarray, V: np.ndarray, validate: bool = True) -> np.ndarray:
    """Riemannian exponential P^1/2 exp(P^-1/2 V P^-1/2) P^1/2."""
    P = np.asarray(P, dtype=float)
    V = np.asarray(V, dtype=float)
    _check_pair(P, V)
    if validate:
        check_spd(P)
        check_symmetric(V)
    sP, isP = sqrt_and_invsqrt(P)
    w, U = _eigh(_congruence(isP, V))
    return _congruence(sP, _rebuild(U, np.exp(w)))


def log_map(P: np.ndarray, Q: np.ndarray, validate: bool = True) -> np.ndarray:
    """Riemannian logarithm P^1/2 log(P^-1/2 Q P^-1/2) P^1/2; zero when P == Q."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _check_pair(P, Q)
    if validate:
        check_spd(P)
        check_spd(Q)
    if np.array_equal(P, Q):
        return np.zeros_like(P)
    sP, isP = sqrt_and_invsqrt(P)
    return _congruence(sP, whitened_log(isP, Q))


def whitened_log(isP: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """
    log(P^-1/2 Q P^-1/2) given P^-1/2.

    This is log_map(P, Q) expressed in the orthonormal frame at P, where
    the affine-invariant inner product becomes the Frobenius one.
    """
    w, U = _eigh(_congruence(isP, Q))
    _check_eigenvalues_positive(w)
    return _rebuild(U, np.log(w))


def dist_log_euclidean(P: np.ndarray, Q: np.ndarray, validate: bool = True) -> float:
    """Log-Euclidean distance ||log P - log Q||_F."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _check_pair(P, Q)
    if np.array_equal(P, Q):
        if validate:
            check_spd(P)
        return 0.0
    if validate:
        return float(np.linalg.norm(spectral_apply(P, LOG) - spectral_apply(Q, LOG)))
    return float(np.linalg.norm(_log_unchecked(P) - _log_unchecked(Q)))


def _log_unchecked(P: np.ndarray) -> np.ndarray:
    w, U = _eigh(P)
    _check_eigenvalues_positive(w)
    return _rebuild(U, np.log(w))


def log_stack(Xs: np.ndarray) -> np.ndarray:
    """Matrix logarithm of every matrix in a validated (N, n, n) stack."""
    try:
        w, U = np.linalg.eigh(Xs)
    except np.linalg.LinAlgError as e:
        raise EigenFailure(f'batched eigendecomposition failed: {e}') from e
    if np.any(w[:, 0] <= 0.0):
        bad = int(np.argmax(w[:, 0] <= 0.0))
        raise NotPositiveDefinite('matrix is not positive definite',
                                  min_eigenvalue=float(w[bad, 0]), index=bad)
    L = (U * np.log(w)[:, None, :]) @ np.swapaxes(U, -1, -2)
    return 0.5 * (L + np.swapaxes(L, -1, -2))


def log_euclidean_mean(points: Sequence[np.ndarray]) -> np.ndarray:
    """exp of the arithmetic mean of matrix logarithms."""
    Xs = np.asarray(points, dtype=float)
    if Xs.ndim != 3 or len(Xs) == 0:
        raise DimMismatch('expected a nonempty stack of square matrices')
    return spectral_apply(np.mean(log_stack(Xs), axis=0), EXP)


def geodesic_log_euclidean(P: np.ndarray, Q: np.ndarray, t: float) -> np.ndarray:
    """exp((1 - t) log P + t log Q)."""
    _check_pair(np.asarray(P), np.asarray(Q))
    L = (1.0 - t) * spectral_apply(P, LOG) + t * spectral_apply(Q, LOG)
    return spectral_apply(L, EXP)


def project_to_det(P: np.ndarray, r: float) -> np.ndarray:
    """
    Project P onto the slice {det = r}: (r / det P)^(1/n) * P.

    The scale is formed in log space so large n does not overflow det P.
    """
    if not r > 0:
        raise ValueError(f'target determinant must be positive, got {r}')
    P = check_spd(P)
    n = P.shape[0]
    _, logdet = np.linalg.slogdet(P)
    return np.exp((np.log(r) - logdet) / n) * P
