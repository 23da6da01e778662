"""
Dataset files and ingestion.

The ``.spd`` format is one JSON header line followed by a binary payload:

    {"format_version": 1, "n": n, "N": N, "has_labels": true, "provenance": {...}}\\n
    N * n * n little-endian float64 values, matrices in row-major order
    N little-endian int64 labels (only when has_labels)

Stacks saved with numpy (``.npy``, shape (N, n, n)) are accepted as well,
and connectivity data can be read as one strictly upper triangle per row.
"""

import json
import math
import os
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .spdcluster_errors import DimMismatch, IoError, NotPositiveDefinite, ParseError, SpdClusterError
from .spdcluster_export import ResultsEncoder, read_json, write_json
from .spdcluster_helpers import log_verbose
from .spdcluster_manifold import check_spd
from .spdcluster_partition import Partition
from .spdcluster_synthgen import LabeledDataset

FORMAT_VERSION = 1
_FLOAT = np.dtype('<f8')
_INT = np.dtype('<i8')


def _validate_stack(points: np.ndarray, first_index: int = 0) -> None:
    for i, X in enumerate(points):
        try:
            check_spd(X)
        except SpdClusterError as e:
            raise e.attach_index(first_index + i)


def save_dataset(path: str, points: Sequence[np.ndarray], labels: Optional[Sequence[int]] = None,
                 provenance: Optional[Dict[str, Any]] = None) -> str:
    """
    Write a dataset in the ``.spd`` format.

    Raises:
        DimMismatch: points are not a stack of square matrices, or labels
            do not match them in length
        IoError: the file cannot be written
    """
    Xs = np.asarray(points, dtype=float)
    if Xs.ndim != 3 or Xs.shape[1] != Xs.shape[2]:
        raise DimMismatch(f'expected a stack of square matrices, got shape {Xs.shape}')
    header: Dict[str, Any] = {
        'format_version': FORMAT_VERSION,
        'n': int(Xs.shape[1]),
        'N': int(Xs.shape[0]),
        'has_labels': labels is not None,
        'provenance': provenance or {},
    }
    payload = [Xs.astype(_FLOAT, copy=False).tobytes(order='C')]
    if labels is not None:
        lab = np.asarray(labels, dtype=np.int64)
        if lab.shape != (Xs.shape[0],):
            raise DimMismatch(f'{lab.shape} labels for {Xs.shape[0]} matrices')
        payload.append(lab.astype(_INT, copy=False).tobytes())
    line = json.dumps(header, cls=ResultsEncoder, sort_keys=True).encode('utf-8') + b'\n'
    try:
        with open(path, 'wb') as f:
            f.write(line)
            for chunk in payload:
                f.write(chunk)
    except OSError as e:
        raise IoError(f'cannot write {path}: {e}') from e
    log_verbose(f'Saved {Xs.shape[0]} matrices of size {Xs.shape[1]} to {path}')
    return path


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, 'rb') as f:
            return f.read()
    except OSError as e:
        raise IoError(f'cannot read {path}: {e}') from e


def parse_dataset(raw: bytes, validate: bool = True) -> LabeledDataset:
    """Decode the bytes of a ``.spd`` file."""
    nl = raw.find(b'\n')
    if nl < 0:
        raise ParseError('missing header line', offset=len(raw))
    try:
        header = json.loads(raw[:nl].decode('utf-8'))
    except UnicodeDecodeError as e:
        raise ParseError(f'header is not UTF-8: {e.reason}', offset=e.start) from e
    except json.JSONDecodeError as e:
        raise ParseError(f'malformed header: {e.msg}', offset=e.pos) from e
    if not isinstance(header, dict):
        raise ParseError('header is not a JSON object', offset=0)
    for key in ('format_version', 'n', 'N', 'has_labels'):
        if key not in header:
            raise ParseError(f'header lacks "{key}"', offset=nl)
    if header['format_version'] != FORMAT_VERSION:
        raise ParseError(f'unsupported format_version {header["format_version"]}', offset=0)
    n, N = int(header['n']), int(header['N'])
    if n < 1 or N < 0:
        raise ParseError(f'invalid dimensions n={n}, N={N}', offset=0)

    start = nl + 1
    mat_bytes = N * n * n * _FLOAT.itemsize
    end = start + mat_bytes
    if len(raw) < end:
        raise ParseError(f'truncated payload: expected {mat_bytes} matrix bytes', offset=len(raw))
    points = np.frombuffer(raw, dtype=_FLOAT, count=N * n * n, offset=start).reshape(N, n, n)
    points = points.astype(float)

    labels = None
    if header['has_labels']:
        lab_end = end + N * _INT.itemsize
        if len(raw) < lab_end:
            raise ParseError(f'truncated labels: expected {N * _INT.itemsize} bytes', offset=len(raw))
        labels = np.frombuffer(raw, dtype=_INT, count=N, offset=end).astype(int)
        end = lab_end
    if len(raw) != end:
        raise ParseError(f'{len(raw) - end} trailing bytes after payload', offset=end)

    if validate:
        _validate_stack(points)
    return LabeledDataset(points, labels, provenance=dict(header.get('provenance') or {}))


def load_npy(path: str, labels_path: Optional[str] = None, validate: bool = True) -> LabeledDataset:
    """
    Read a numpy stack of matrices; each matrix is symmetrized on ingest.

    A 2-D array is read as a single matrix.
    """
    try:
        arr = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as e:
        raise IoError(f'cannot read {path}: {e}') from e
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimMismatch(f'{path}: expected shape (N, n, n), got {arr.shape}')
    points = 0.5 * (arr + np.swapaxes(arr, -1, -2))
    labels = None
    if labels_path is not None:
        try:
            labels = np.load(labels_path, allow_pickle=False).astype(int)
        except (OSError, ValueError) as e:
            raise IoError(f'cannot read {labels_path}: {e}') from e
        if labels.shape != (len(points),):
            raise DimMismatch(f'{labels_path}: {labels.shape} labels for {len(points)} matrices')
    if validate:
        _validate_stack(points)
    return LabeledDataset(points, labels, provenance={'source': os.path.basename(path)})


def load_dataset(path: str, validate: bool = True, labels_path: Optional[str] = None,
                 eps: float = 1e-6) -> LabeledDataset:
    """
    Load a dataset by file extension.

    ``.spd`` files use the native format, ``.npy`` a numpy stack, and
    ``.csv`` / ``.txt`` connectivity rows completed with ``eps`` jitter.

    Raises:
        ParseError: malformed file, with the byte offset of the problem
        NotPositiveDefinite: a matrix fails validation; ``index`` names it
        IoError: the file cannot be read
    """
    ext = os.path.splitext(path)[1].lower()
    if ext == '.npy':
        return load_npy(path, labels_path, validate)
    if ext in ('.csv', '.txt'):
        return load_connectivity_rows(path, eps=eps, labels_path=labels_path)
    ds = parse_dataset(_read_bytes(path), validate)
    log_verbose(f'Loaded {len(ds)} matrices of size {ds.n} from {path}')
    return ds


def complete_upper_triangular(entries: Sequence[float], n: int, eps: float = 1e-6) -> np.ndarray:
    """
    Build an SPD matrix from its strict upper triangle.

    The diagonal is set to one, the lower triangle mirrored, and eps * Id
    added.

    Raises:
        DimMismatch: len(entries) != n(n-1)/2
        NotPositiveDefinite: still not positive definite; the minimum
            eigenvalue is reported so the caller can raise eps
    """
    vals = np.asarray(entries, dtype=float).ravel()
    expected = n * (n - 1) // 2
    if vals.size != expected:
        raise DimMismatch(f'{vals.size} entries given, {expected} needed for n={n}')
    A = np.eye(n)
    A[np.triu_indices(n, 1)] = vals
    A = A + np.triu(A, 1).T
    A = 0.5 * (A + A.T) + eps * np.eye(n)
    w_min = float(np.linalg.eigvalsh(A)[0])
    if not w_min > 0.0:
        raise NotPositiveDefinite(
            f'completed matrix is not positive definite (min eigenvalue {w_min:.6e}); increase eps',
            min_eigenvalue=w_min)
    return A


def _size_from_entries(count: int) -> int:
    n = int(round((1 + math.sqrt(1 + 8 * count)) / 2))
    if n * (n - 1) // 2 != count:
        raise DimMismatch(f'{count} entries per row is not a strict upper triangle size')
    return n


def load_connectivity_rows(path: str, eps: float = 1e-6, delimiter: Optional[str] = None,
                           labels_path: Optional[str] = None) -> LabeledDataset:
    """
    Read one strict upper triangle per line and complete each to SPD.

    Commas or whitespace separate values; ``#`` starts a comment.
    """
    if delimiter is None:
        delimiter = ',' if path.lower().endswith('.csv') else None
    try:
        rows = np.loadtxt(path, delimiter=delimiter, ndmin=2, comments='#')
    except (OSError, ValueError) as e:
        raise IoError(f'cannot read {path}: {e}') from e
    n = _size_from_entries(rows.shape[1])
    points = np.empty((len(rows), n, n))
    for i, row in enumerate(rows):
        try:
            points[i] = complete_upper_triangular(row, n, eps)
        except SpdClusterError as e:
            raise e.attach_index(i)
    labels = None
    if labels_path is not None:
        try:
            labels = np.loadtxt(labels_path, dtype=int, ndmin=1)
        except (OSError, ValueError) as e:
            raise IoError(f'cannot read {labels_path}: {e}') from e
        if labels.shape != (len(points),):
            raise DimMismatch(f'{labels_path}: {labels.shape} labels for {len(points)} matrices')
    log_verbose(f'Completed {len(points)} connectivity matrices of size {n}')
    return LabeledDataset(points, labels, provenance={'source': os.path.basename(path), 'eps': eps})


def save_partition(path: str, partition: Partition, extra: Optional[Dict[str, Any]] = None) -> str:
    """Write a partition (labels, centroids, dispersion, metadata) as JSON."""
    doc = partition.to_dict()
    if extra:
        doc.update(extra)
    return write_json(path, doc)


def load_partition(path: str) -> Partition:
    doc = read_json(path)
    try:
        return Partition.from_dict(doc)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f'{path} is not a partition document: {e}', offset=0) from e
