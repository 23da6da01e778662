"""
Benchmark experiments.

An ExperimentConfig names a data generator, the algorithms to compare, a
reference-point strategy for the Frechet-map pipelines and the solver
settings. ``run_experiment`` repeats generate -> select references ->
cluster -> evaluate with per-repetition seeds and collects one row per
(repetition, algorithm) plus a per-algorithm summary.
"""

import json
import os
import time
import traceback
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .spdcluster_config import get_config
from .spdcluster_dataset import load_dataset
from .spdcluster_embed import FrechetMapSpec
from .spdcluster_errors import ConfigError
from .spdcluster_evaluation import evaluate_partition
from .spdcluster_helpers import (
    derive_seed,
    get_memory_usage,
    library_version,
    log_debug,
    log_verbose,
    log_warning,
    parallel_map,
)
from .spdcluster_mean import MeanSolverConfig
from .spdcluster_partition import KMeansConfig, Partition
from .spdcluster_pipelines import cluster_arc, cluster_fmc, cluster_irc, cluster_lec
from .spdcluster_refpoints import PrincipledParams, select_principled, select_random
from .spdcluster_synthgen import BallConfig, LabeledDataset, gen_ball_config, gen_mirror_config

ALGORITHMS = ('IRC', 'ARC', 'LEC', 'FMC1', 'FMC2')
GENERATORS = ('ball', 'mirror', 'file')
REF_KINDS = ('random', 'principled')

ROW_COLUMNS = [
    'experiment', 'repetition', 'seed', 'algorithm', 'status',
    'k', 'n', 'N', 'ref_strategy', 'n_refs',
    'accuracy', 'totdisp', 'truth_totdisp', 'normalized_totdisp',
    'runtime_s', 'speedup', 'runtime_generate_s', 'runtime_refs_s',
    'runtime_cluster_s', 'runtime_eval_s', 'iterations', 'converged',
    'ref_params', 'library_version', 'error',
]

SUMMARY_COLUMNS = [
    'algorithm', 'runs', 'failed',
    'accuracy_mean', 'accuracy_std', 'accuracy_min', 'accuracy_p10',
    'normalized_mean', 'normalized_std', 'totdisp_mean',
    'runtime_mean', 'speedup',
]


def _known_fields(cls, d: Dict[str, Any], where: str) -> Dict[str, Any]:
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(d) - names)
    if unknown:
        log_warning(f'ignoring unknown {where} keys: {", ".join(unknown)}')
    return {key: value for key, value in d.items() if key in names}


@dataclass
class GeneratorSpec:
    """Where the data of each repetition comes from."""

    kind: str = 'ball'
    k: int = 2
    n: int = 4
    samples_per_ball: int = 400
    radius_range: Tuple[float, float] = (0.8, 1.2)
    d_low: float = 1.1
    d_up: float = 3.0
    center_scale: float = 2.0
    norm: float = 12.0
    perturb_var: float = 0.1
    min_gap: float = 2.0
    max_retries: int = 10000
    path: Optional[str] = None
    labels_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ConfigError(f'unknown generator "{self.kind}" (expected one of {", ".join(GENERATORS)})')
        if self.kind == 'file' and not self.path:
            raise ConfigError('the file generator needs a path')
        if self.kind == 'mirror':
            self.k = 4
        self.radius_range = tuple(float(r) for r in self.radius_range)

    def build(self, seed: int) -> LabeledDataset:
        if self.kind == 'ball':
            return gen_ball_config(BallConfig(
                k=self.k, n=self.n, samples_per_ball=self.samples_per_ball,
                radius_range=self.radius_range, d_low=self.d_low, d_up=self.d_up,
                center_scale=self.center_scale, seed=seed, max_retries=self.max_retries))
        if self.kind == 'mirror':
            return gen_mirror_config(self.n, self.norm, self.perturb_var, self.min_gap,
                                     self.samples_per_ball, seed, self.max_retries)
        return load_dataset(self.path, labels_path=self.labels_path)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d['radius_range'] = list(self.radius_range)
        return d


@dataclass
class RefStrategy:
    """Reference-point selection shared by every Frechet-map algorithm of a repetition."""

    kind: str = 'principled'
    n_refs: Optional[int] = None  # random only; defaults to k(k-1)
    t_close: float = 5.0
    t_far: float = 0.35
    eps_d: float = 2.5
    n_rho: int = 50
    quantile: float = 0.90

    def __post_init__(self):
        if self.kind not in REF_KINDS:
            raise ConfigError(f'unknown reference strategy "{self.kind}" (expected random or principled)')
        if self.n_refs is not None and self.n_refs < 1:
            raise ConfigError(f'n_refs must be at least 1, got {self.n_refs}')

    def params(self, seed: Optional[int]) -> PrincipledParams:
        return PrincipledParams(self.t_close, self.t_far, self.n_rho, self.eps_d, self.quantile, seed)

    def echo(self, k: int) -> Dict[str, Any]:
        if self.kind == 'random':
            return {'kind': 'random', 'n_refs': self.n_refs or k * (k - 1)}
        return {'kind': 'principled', 't_close': self.t_close, 't_far': self.t_far,
                'eps_d': self.eps_d, 'n_rho': self.n_rho, 'quantile': self.quantile}

    def select(self, data: np.ndarray, k: int, seed: int,
               kmeans_cfg: Optional[KMeansConfig] = None) -> Tuple[np.ndarray, Dict[str, Any]]:
        """
        Returns:
            (references, report dict)
        """
        if self.kind == 'random':
            ell = self.n_refs or max(k * (k - 1), 1)
            return select_random(data, ell, seed), {'strategy': 'random', 'n_refs': ell}
        refs, report = select_principled(data, k, self.params(seed), kmeans_cfg)
        return refs, report.to_dict()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentConfig:
    """A complete, reproducible benchmark description."""

    name: str = 'experiment'
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    algorithms: List[str] = field(default_factory=lambda: ['FMC2'])
    refs: RefStrategy = field(default_factory=RefStrategy)
    restarts: int = 10
    max_iter: int = 100
    eta: float = 0.5
    grad_tol: float = 1e-8
    mean_max_iter: int = 200
    eval_mean_method: str = 'icm'
    repetitions: int = 1
    seed: Optional[int] = None
    parallel_repetitions: bool = True
    output: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.algorithms, str):
            self.algorithms = [self.algorithms]
        self.algorithms = [a.upper() for a in self.algorithms]
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f'unknown algorithms {bad} (expected some of {", ".join(ALGORITHMS)})')
        if self.repetitions < 1:
            raise ConfigError(f'repetitions must be at least 1, got {self.repetitions}')
        if self.eval_mean_method not in ('icm', 'gd'):
            raise ConfigError(f'eval_mean_method must be icm or gd, got {self.eval_mean_method}')
        if self.restarts < 1 or self.max_iter < 1:
            raise ConfigError('restarts and max_iter must be at least 1')

    @property
    def uses_refs(self) -> bool:
        return any(a.startswith('FMC') for a in self.algorithms)

    def kmeans_config(self, k: int, seed: Optional[int]) -> KMeansConfig:
        return KMeansConfig(k=k, restarts=self.restarts, max_iter=self.max_iter, seed=seed)

    def mean_config(self) -> MeanSolverConfig:
        return MeanSolverConfig(eta=self.eta, grad_tol=self.grad_tol, max_iter=self.mean_max_iter)

    def to_dict(self) -> Dict[str, Any]:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d['generator'] = self.generator.to_dict()
        d['refs'] = self.refs.to_dict()
        d['algorithms'] = list(self.algorithms)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'ExperimentConfig':
        """Build a config from a plain dict. Unknown keys are reported and ignored."""
        d = dict(d)
        gen = d.pop('generator', {}) or {}
        refs = d.pop('refs', {}) or {}
        if isinstance(gen, str):
            gen = {'kind': gen}
        if isinstance(refs, str):
            refs = {'kind': refs}
        return cls(
            generator=GeneratorSpec(**_known_fields(GeneratorSpec, gen, 'generator')),
            refs=RefStrategy(**_known_fields(RefStrategy, refs, 'refs')),
            **_known_fields(cls, d, 'experiment'),
        )


PRESETS: Dict[str, Dict[str, Any]] = {
    # random references on k = 2 balls, two references
    'random2': {
        'name': 'random2',
        'generator': {'kind': 'ball', 'k': 2, 'n': 4, 'samples_per_ball': 400, 'd_low': 1.1, 'd_up': 3.0},
        'algorithms': ['FMC2'],
        'refs': {'kind': 'random', 'n_refs': 2},
        'repetitions': 20,
    },
    'principled': {
        'name': 'principled',
        'generator': {'kind': 'ball', 'k': 5, 'n': 4, 'samples_per_ball': 400, 'd_low': 1.1, 'd_up': 3.0},
        'algorithms': ['FMC2'],
        'refs': {'kind': 'principled', 't_close': 5.0, 't_far': 0.35, 'eps_d': 2.5},
        'repetitions': 10,
    },
    'mirror': {
        'name': 'mirror',
        'generator': {'kind': 'mirror', 'n': 4, 'samples_per_ball': 500},
        'algorithms': ['FMC1', 'FMC2', 'LEC'],
        'refs': {'kind': 'principled', 't_close': 5.0, 't_far': 0.35, 'eps_d': 2.5},
        'repetitions': 25,
    },
    'dim20': {
        'name': 'dim20',
        'generator': {'kind': 'ball', 'k': 4, 'n': 20, 'samples_per_ball': 500, 'd_low': 1.1, 'd_up': 3.0},
        'algorithms': ['IRC', 'ARC', 'FMC2'],
        'refs': {'kind': 'principled', 't_close': 5.0, 't_far': 0.35, 'eps_d': 2.5},
        'repetitions': 1,
        'parallel_repetitions': False,
    },
    'smoke23': {
        'name': 'smoke23',
        'generator': {'kind': 'ball', 'k': 4, 'n': 23, 'samples_per_ball': 50, 'd_low': 1.1, 'd_up': 3.0},
        'algorithms': ['IRC', 'ARC', 'LEC', 'FMC2'],
        'refs': {'kind': 'principled'},
        'restarts': 3,
        'repetitions': 1,
        'parallel_repetitions': False,
    },
    'smoke197': {
        'name': 'smoke197',
        'generator': {'kind': 'ball', 'k': 2, 'n': 197, 'samples_per_ball': 73, 'd_low': 1.1, 'd_up': 3.0},
        'algorithms': ['IRC', 'ARC', 'LEC', 'FMC2'],
        'refs': {'kind': 'principled'},
        'restarts': 3,
        'repetitions': 1,
        'parallel_repetitions': False,
    },
}


def preset_config(name: str, **overrides: Any) -> ExperimentConfig:
    """ExperimentConfig of a named preset; top-level keys may be overridden."""
    if name not in PRESETS:
        raise ConfigError(f'unknown preset "{name}" (available: {", ".join(sorted(PRESETS))})')
    d = json.loads(json.dumps(PRESETS[name]))
    d.update(overrides)
    return ExperimentConfig.from_dict(d)


def load_experiment_config(path: str) -> ExperimentConfig:
    """
    Read an experiment description from JSON, or YAML when PyYAML is installed.
    """
    ext = os.path.splitext(path)[1].lower()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            if ext in ('.yaml', '.yml'):
                try:
                    import yaml
                except ImportError as e:
                    raise ConfigError('PyYAML is required to read YAML experiment files') from e
                d = yaml.safe_load(f)
            else:
                d = json.load(f)
    except OSError as e:
        raise ConfigError(f'cannot read experiment file {path}: {e}') from e
    except ValueError as e:
        raise ConfigError(f'cannot parse experiment file {path}: {e}') from e
    if not isinstance(d, dict):
        raise ConfigError(f'{path} does not hold an experiment mapping')
    return ExperimentConfig.from_dict(d)


def cluster_with(algorithm: str, data: np.ndarray, kmeans_cfg: KMeansConfig,
                 refs: Optional[np.ndarray] = None,
                 mean_cfg: Optional[MeanSolverConfig] = None) -> Partition:
    """Dispatch to one of the IRC / ARC / LEC / FMC1 / FMC2 pipelines."""
    algorithm = algorithm.upper()
    if algorithm == 'IRC':
        return cluster_irc(data, kmeans_cfg, mean_cfg)
    if algorithm == 'ARC':
        return cluster_arc(data, kmeans_cfg)
    if algorithm == 'LEC':
        return cluster_lec(data, kmeans_cfg)
    if algorithm in ('FMC1', 'FMC2'):
        if refs is None:
            raise ConfigError(f'{algorithm} needs reference points')
        return cluster_fmc(data, FrechetMapSpec(refs, p=int(algorithm[-1])), kmeans_cfg)
    raise ConfigError(f'unknown algorithm "{algorithm}"')


@dataclass
class ExperimentResult:
    """Rows ordered by (repetition, algorithm) plus the per-algorithm summary."""

    rows: List[Dict[str, Any]]
    summary: List[Dict[str, Any]]
    provenance: Dict[str, Any]
    columns: List[str] = field(default_factory=lambda: list(ROW_COLUMNS))
    summary_columns: List[str] = field(default_factory=lambda: list(SUMMARY_COLUMNS))

    @property
    def failed(self) -> List[Dict[str, Any]]:
        return [r for r in self.rows if r['status'] != 'ok']

    def to_dict(self) -> Dict[str, Any]:
        return {'provenance': self.provenance, 'rows': self.rows, 'summary': self.summary}


def _error_text(e: BaseException) -> str:
    return f'{type(e).__name__}: {e}'


def _base_row(cfg: ExperimentConfig, repetition: int, seed: int, algorithm: str) -> Dict[str, Any]:
    row = {c: None for c in ROW_COLUMNS}
    row.update({
        'experiment': cfg.name,
        'repetition': repetition,
        'seed': seed,
        'algorithm': algorithm,
        'status': 'ok',
        'library_version': library_version(),
    })
    if algorithm.startswith('FMC'):
        row['ref_strategy'] = cfg.refs.kind
        row['ref_params'] = cfg.refs.echo(cfg.generator.k)
    return row


def _fail_all(rows: List[Dict[str, Any]], e: BaseException) -> List[Dict[str, Any]]:
    for row in rows:
        row['status'] = 'failed'
        row['error'] = _error_text(e)
    return rows


def run_repetition(cfg: ExperimentConfig, repetition: int, master_seed: int) -> List[Dict[str, Any]]:
    """
    One repetition of the experiment: one row per algorithm.

    Failures are recorded on the affected rows and never raised.
    """
    seed = derive_seed(master_seed, repetition)
    rows = [_base_row(cfg, repetition, seed, a) for a in cfg.algorithms]
    try:
        start = time.perf_counter()
        ds = cfg.generator.build(derive_seed(seed, 0))
        t_generate = time.perf_counter() - start
    except Exception as e:
        log_warning(f'repetition {repetition}: data generation failed: {_error_text(e)}')
        return _fail_all(rows, e)
    if ds.labels is None:
        return _fail_all(rows, ConfigError('benchmark data must carry ground-truth labels'))
    k = ds.k if cfg.generator.kind == 'file' else cfg.generator.k
    kmeans_cfg = cfg.kmeans_config(k, derive_seed(seed, 2))
    mean_cfg = cfg.mean_config()

    refs, ref_error, t_refs = None, None, 0.0
    if cfg.uses_refs:
        try:
            start = time.perf_counter()
            refs, _ = cfg.refs.select(ds.points, k, derive_seed(seed, 1), kmeans_cfg)
            t_refs = time.perf_counter() - start
        except Exception as e:
            log_warning(f'repetition {repetition}: reference selection failed: {_error_text(e)}')
            ref_error = e

    for row in rows:
        algorithm = row['algorithm']
        row.update({'k': k, 'n': ds.n, 'N': len(ds), 'runtime_generate_s': t_generate})
        is_fmc = algorithm.startswith('FMC')
        if is_fmc:
            if ref_error is not None:
                _fail_all([row], ref_error)
                continue
            row['n_refs'] = len(refs)
            row['runtime_refs_s'] = t_refs
        try:
            start = time.perf_counter()
            part = cluster_with(algorithm, ds.points, kmeans_cfg, refs, mean_cfg)
            t_cluster = time.perf_counter() - start
            start = time.perf_counter()
            report = evaluate_partition(ds.points, part.labels, k, ds.labels,
                                        mean_method=cfg.eval_mean_method, mean_cfg=mean_cfg)
            t_eval = time.perf_counter() - start
        except Exception as e:
            log_warning(f'repetition {repetition}: {algorithm} failed: {_error_text(e)}')
            log_debug(traceback.format_exc())
            _fail_all([row], e)
            continue
        row.update({
            'accuracy': report.accuracy,
            'totdisp': report.totdisp,
            'truth_totdisp': report.truth_totdisp,
            'normalized_totdisp': report.normalized_totdisp,
            'runtime_cluster_s': t_cluster,
            'runtime_eval_s': t_eval,
            'runtime_s': t_cluster + (t_refs if is_fmc else 0.0),
            'iterations': part.iterations,
            'converged': part.converged,
        })

    irc = next((r for r in rows if r['algorithm'] == 'IRC' and r['status'] == 'ok'), None)
    for row in rows:
        if irc is not None and row['status'] == 'ok' and row['runtime_s']:
            row['speedup'] = irc['runtime_s'] / row['runtime_s']
    log_verbose(f'repetition {repetition} done (memory {get_memory_usage():.1f} MB)')
    return rows


def _stats(values: List[float]) -> Dict[str, Optional[float]]:
    if not values:
        return {'mean': None, 'std': None, 'min': None, 'p10': None}
    arr = np.asarray(values, dtype=float)
    return {
        'mean': float(arr.mean()),
        'std': float(arr.std()),
        'min': float(arr.min()),
        'p10': float(np.percentile(arr, 10)),
    }


def summarize(rows: List[Dict[str, Any]], algorithms: List[str]) -> List[Dict[str, Any]]:
    """
    Per-algorithm aggregate over successful rows.

    Accuracy gets mean, population std, min and 10th percentile; speedup
    is the mean IRC runtime over the mean runtime of the algorithm.
    """
    runtimes: Dict[str, Optional[float]] = {}
    summary = []
    for algorithm in algorithms:
        mine = [r for r in rows if r['algorithm'] == algorithm]
        ok = [r for r in mine if r['status'] == 'ok']
        acc = _stats([r['accuracy'] for r in ok])
        norm = _stats([r['normalized_totdisp'] for r in ok])
        runtimes[algorithm] = float(np.mean([r['runtime_s'] for r in ok])) if ok else None
        summary.append({
            'algorithm': algorithm,
            'runs': len(mine),
            'failed': len(mine) - len(ok),
            'accuracy_mean': acc['mean'],
            'accuracy_std': acc['std'],
            'accuracy_min': acc['min'],
            'accuracy_p10': acc['p10'],
            'normalized_mean': norm['mean'],
            'normalized_std': norm['std'],
            'totdisp_mean': float(np.mean([r['totdisp'] for r in ok])) if ok else None,
            'runtime_mean': runtimes[algorithm],
            'speedup': None,
        })
    irc = runtimes.get('IRC')
    if irc:
        for entry in summary:
            if entry['runtime_mean']:
                entry['speedup'] = irc / entry['runtime_mean']
    return summary


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Run every repetition and collect the results.

    Repetition r uses the seed derived from (seed, r), so rows do not
    depend on the order in which parallel repetitions finish. A failed
    repetition becomes failed rows; the batch always completes.
    """
    master_seed = cfg.seed
    if master_seed is None:
        master_seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        log_warning(f'no seed given; using {master_seed}')
    started = time.time()
    reps = list(range(cfg.repetitions))
    workers = None if cfg.parallel_repetitions else 1
    per_rep = parallel_map(lambda r: run_repetition(cfg, r, master_seed), reps, workers)
    rows = [row for chunk in per_rep for row in chunk]
    summary = summarize(rows, cfg.algorithms)
    provenance = {
        'experiment': cfg.to_dict(),
        'master_seed': master_seed,
        'library_version': library_version(),
        'config': get_config().to_dict(),
        'started': started,
        'elapsed_s': time.time() - started,
    }
    n_failed = sum(1 for r in rows if r['status'] != 'ok')
    log_verbose(f'{cfg.name}: {len(rows)} rows, {n_failed} failed')
    return ExperimentResult(rows, summary, provenance)
