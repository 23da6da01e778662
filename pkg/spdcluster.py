#!/usr/bin/env python3
"""
spdcluster - k-means clustering of SPD matrices.

This is the main entry point. All functionality is in the src/ package.
"""

import sys

# Version check
if sys.version_info < (3, 8):
    print("Python 3.8 or higher is required for spdcluster", file=sys.stderr)
    sys.exit(1)

from src import (
    # Configuration
    get_config, SpdClusterConfig,

    # Geometry and embedding
    dist_affine, geodesic, FrechetMapSpec, embed_dataset,

    # Clustering
    KMeansConfig, Partition,
    cluster_irc, cluster_arc, cluster_lec, cluster_fmc,
    select_random, select_principled,

    # Data, evaluation, experiments
    gen_ball_config, gen_mirror_config, load_dataset, save_dataset,
    evaluate_partition, run_experiment,

    # CLI
    usage, SpdCluster,
)


if __name__ == '__main__':
    try:
        code = SpdCluster().run(sys.argv[1:])
    except KeyboardInterrupt:
        print('\nInterrupted by user')
        sys.exit(1)
    except KeyError as e:
        print(f'FATAL: Configuration error: {e}')
        sys.exit(1)
    except Exception as e:
        print(f'FATAL: Unexpected error: {e}')
        if get_config().debug:
            import traceback
            traceback.print_exc()
        sys.exit(1)
    sys.exit(code)
