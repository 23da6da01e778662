"""
Helper utility functions for spdcluster.

Printing helpers gated on the verbose/debug switches, seed derivation,
deterministic reductions, timing and memory reporting.
"""

import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, TypeVar

import numpy as np

from .spdcluster_config import get_config

T = TypeVar('T')
R = TypeVar('R')

# Timing variables
time_start = time.time()


def log_verbose(msg: str) -> None:
    """Print a progress message when verbose output is enabled."""
    if get_config().verbose:
        print(msg)


def log_debug(msg: str) -> None:
    """Print a diagnostic message when debug output is enabled."""
    if get_config().debug:
        print(f'DEBUG: {msg}')


def log_warning(msg: str) -> None:
    """Print a warning to stderr. Always shown."""
    print(f'Warning: {msg}', file=sys.stderr)


@contextmanager
def stage_timer(label: str, timings: Optional[Dict[str, float]] = None) -> Iterator[None]:
    """
    Time a pipeline stage.

    The elapsed wall-clock seconds are added to ``timings[label]`` when a
    dict is given, and echoed in verbose mode.

    Args:
        label: Stage name
        timings: Optional accumulator dict
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        if timings is not None:
            timings[label] = timings.get(label, 0.0) + elapsed
        log_verbose(f'[{elapsed:.5f}s] {label}')


def format_duration(seconds: float) -> str:
    """
    Format a duration in seconds to a human-readable string.

    Args:
        seconds: Duration in seconds

    Returns:
        Formatted duration string (e.g., "1h 23m 45s")
    """
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = int(seconds // 60)
        secs = seconds % 60
        return f"{minutes}m {secs:.0f}s"
    else:
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        secs = seconds % 60
        return f"{hours}h {minutes}m {secs:.0f}s"


def sanitize_filename(name: str) -> str:
    """
    Sanitize a string for use as a filename.

    Args:
        name: The string to sanitize

    Returns:
        Sanitized string safe for use as filename
    """
    for char in ['/', '\\', ':', '*', '?', '"', '<', '>', '|', ' ']:
        name = name.replace(char, '_')
    return name


def derive_seed(master: int, *path: int) -> int:
    """
    Derive a child seed from a master seed and an index path.

    The same (master, path) always gives the same seed, independent of the
    order in which children are requested.
    """
    ss = np.random.SeedSequence([int(master)] + [int(p) for p in path])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """Seeded numpy Generator; ``None`` draws fresh OS entropy."""
    return np.random.default_rng(seed)


def tree_sum(terms: Sequence[np.ndarray]) -> np.ndarray:
    """
    Sum arrays by fixed pairwise reduction.

    The tree shape depends only on ``len(terms)``, so the result is
    bitwise reproducible however the terms were computed.
    """
    if not terms:
        raise ValueError('tree_sum of an empty sequence')
    level = list(terms)
    while len(level) > 1:
        nxt = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def parallel_map(func: Callable[[T], R], items: Sequence[T],
                 processes: Optional[int] = None) -> List[R]:
    """
    Apply ``func`` to every item, preserving input order.

    Uses a thread pool when more than one worker is configured; numpy and
    LAPACK release the GIL for the heavy kernels.
    """
    workers = processes if processes is not None else get_config().processes
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def get_memory_usage() -> float:
    """Resident memory of this process in MB, or 0.0 if unavailable."""
    try:
        import psutil  # type: ignore
        process = psutil.Process()
        return process.memory_info().rss / 1024 / 1024
    except ImportError:
        # Fallback to basic memory info on systems without psutil
        try:
            import resource
            return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
        except Exception:
            return 0.0


def library_version() -> str:
    """Installed package version, for result provenance."""
    try:
        from importlib.metadata import version
        return version('spdcluster')
    except Exception:
        return '1.0.0'
