"""
spdcluster - k-means clustering of SPD matrices.

Affine-invariant geometry kernels, Frechet-map embeddings, Frechet means,
the IRC / ARC / LEC / FMC clustering pipelines, reference-point selection,
synthetic benchmarks and their evaluation. Each concern lives in its own
``spdcluster_<concern>`` module.
"""

# Configuration
from .spdcluster_config import (
    SpdClusterConfig,
    get_config,
    set_config,
    set_config_value,
)

# Errors
from .spdcluster_errors import (
    SpdClusterError,
    NotSymmetric,
    NotPositiveDefinite,
    EigenFailure,
    DimMismatch,
    AtReferencePoint,
    DegenerateRefs,
    NoSolution,
    RefTouchesSet,
    TooFewPoints,
    DegenerateClusters,
    RetriesExhausted,
    LabelOutOfRange,
    ParseError,
    IoError,
    ConfigError,
    MaxIterExceeded,
)

# Utilities
from .spdcluster_helpers import (
    derive_seed,
    format_duration,
    get_memory_usage,
    make_rng,
    parallel_map,
    sanitize_filename,
    stage_timer,
)

# Geometry
from .spdcluster_manifold import (
    EXP,
    INVSQRT,
    LOG,
    SQRT,
    SpectralFn,
    SpectralKind,
    check_positive,
    check_spd,
    check_symmetric,
    dist_affine,
    dist_affine_many,
    dist_log_euclidean,
    exp_map,
    geodesic,
    geodesic_log_euclidean,
    inner_at,
    log_euclidean_mean,
    log_map,
    project_to_det,
    spectral_apply,
    symmetrize,
)
from .spdcluster_embed import (
    DistortionReport,
    FrechetMapSpec,
    SymBasis,
    distortion_stats,
    embed,
    embed_dataset,
    jacobian,
    local_rank,
    pushed_basis,
)
from .spdcluster_euclid import (
    CoherenceReport,
    EuclidRefs,
    MultilaterationResult,
    embed_euclid,
    hyperplane_separable,
    in_convex_hull,
    invert_multilateration,
    midpoint_convexity_check,
    mutual_coherence,
    paraboloid_membership,
    reflect_across_hull,
)
from .spdcluster_mean import (
    MeanMethod,
    MeanResult,
    MeanSolverConfig,
    Metric,
    compute_mean,
    frechet_mean_gd,
    frechet_mean_icm,
    identity_order,
    shuffled_order,
)

# Clustering
from .spdcluster_partition import InitMethod, KMeansConfig, Partition
from .spdcluster_basepipeline import BaseLloyd
from .spdcluster_kmeans import EuclideanLloyd, lloyd_euclid
from .spdcluster_pipelines import (
    cluster_arc,
    cluster_fmc,
    cluster_irc,
    cluster_lec,
    log_coordinates,
)
from .spdcluster_refpoints import (
    PrincipledParams,
    PrincipledReport,
    estimate_radius,
    select_principled,
    select_random,
)

# Data and evaluation
from .spdcluster_synthgen import (
    BallConfig,
    LabeledDataset,
    MirrorConfig,
    gen_ball_config,
    gen_mirror_config,
    random_spd,
    sample_ball,
)
from .spdcluster_evaluation import (
    EvalReport,
    accuracy,
    dispersion_breakdown,
    evaluate_partition,
    hungarian_align,
    normalized_dispersion,
    total_dispersion,
)
from .spdcluster_dataset import (
    complete_upper_triangular,
    load_connectivity_rows,
    load_dataset,
    load_partition,
    save_dataset,
    save_partition,
)
from .spdcluster_experiment import (
    ExperimentConfig,
    ExperimentResult,
    GeneratorSpec,
    RefStrategy,
    cluster_with,
    load_experiment_config,
    preset_config,
    run_experiment,
)
from .spdcluster_export import ResultsEncoder, ResultsExporter, emit_results, write_json
from .spdcluster_tabledata import SummaryTableFormatter
from .spdcluster_diagnostics import diagnose_euclid, diagnose_spd

# CLI
from .spdcluster_cli import SpdCluster, main, usage

__version__ = '1.0.0'

__all__ = [
    'SpdClusterConfig', 'get_config', 'set_config', 'set_config_value',
    'SpdClusterError', 'NotSymmetric', 'NotPositiveDefinite', 'EigenFailure', 'DimMismatch',
    'AtReferencePoint', 'DegenerateRefs', 'NoSolution', 'RefTouchesSet',
    'TooFewPoints', 'DegenerateClusters', 'RetriesExhausted', 'LabelOutOfRange', 'ParseError',
    'IoError', 'ConfigError', 'MaxIterExceeded',
    'derive_seed', 'format_duration', 'get_memory_usage', 'make_rng', 'parallel_map',
    'sanitize_filename', 'stage_timer',
    'EXP', 'INVSQRT', 'LOG', 'SQRT', 'SpectralFn', 'SpectralKind',
    'check_positive', 'check_spd', 'check_symmetric',
    'dist_affine', 'dist_affine_many', 'dist_log_euclidean', 'exp_map', 'geodesic',
    'geodesic_log_euclidean', 'inner_at', 'log_euclidean_mean', 'log_map', 'project_to_det',
    'spectral_apply', 'symmetrize',
    'DistortionReport', 'FrechetMapSpec', 'SymBasis', 'distortion_stats', 'embed', 'embed_dataset',
    'jacobian', 'local_rank', 'pushed_basis',
    'CoherenceReport', 'EuclidRefs', 'MultilaterationResult', 'embed_euclid', 'hyperplane_separable',
    'in_convex_hull', 'invert_multilateration', 'midpoint_convexity_check', 'mutual_coherence',
    'paraboloid_membership', 'reflect_across_hull',
    'MeanMethod', 'MeanResult', 'MeanSolverConfig', 'Metric', 'compute_mean', 'frechet_mean_gd',
    'frechet_mean_icm', 'identity_order', 'shuffled_order',
    'InitMethod', 'KMeansConfig', 'Partition', 'BaseLloyd', 'EuclideanLloyd', 'lloyd_euclid',
    'cluster_arc', 'cluster_fmc', 'cluster_irc', 'cluster_lec', 'log_coordinates',
    'PrincipledParams', 'PrincipledReport', 'estimate_radius', 'select_principled', 'select_random',
    'BallConfig', 'LabeledDataset', 'MirrorConfig', 'gen_ball_config', 'gen_mirror_config',
    'random_spd', 'sample_ball',
    'EvalReport', 'accuracy', 'dispersion_breakdown', 'evaluate_partition', 'hungarian_align',
    'normalized_dispersion', 'total_dispersion',
    'complete_upper_triangular', 'load_connectivity_rows', 'load_dataset', 'load_partition',
    'save_dataset', 'save_partition',
    'ExperimentConfig', 'ExperimentResult', 'GeneratorSpec', 'RefStrategy', 'cluster_with',
    'load_experiment_config', 'preset_config', 'run_experiment',
    'ResultsEncoder', 'ResultsExporter', 'emit_results', 'write_json',
    'SummaryTableFormatter', 'diagnose_euclid', 'diagnose_spd',
    'SpdCluster', 'main', 'usage',
]
