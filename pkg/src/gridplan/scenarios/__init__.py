from gridplan.scenarios.features import (
    FeatureMatrix,
    Season,
    SeasonPartition,
    build_feature_matrix,
    normalize_minmax,
    reduce_pca,
    stratify_seasons,
)
from gridplan.scenarios.clustering import (
    ClusterResult,
    cluster_and_pick_reps,
    kmeans,
    select_k,
    silhouette_score,
)
from gridplan.scenarios.failures import (
    FailureClassProbabilities,
    OutageWindow,
    fta_probabilities,
    sample_failure_events,
)
from gridplan.scenarios.assemble import (
    Scenario,
    assemble_scenarios,
    generate_scenarios,
    read_scenarios,
    write_scenarios,
)

__all__ = [
    "FeatureMatrix",
    "Season",
    "SeasonPartition",
    "build_feature_matrix",
    "stratify_seasons",
    "normalize_minmax",
    "reduce_pca",
    "ClusterResult",
    "kmeans",
    "silhouette_score",
    "select_k",
    "cluster_and_pick_reps",
    "FailureClassProbabilities",
    "OutageWindow",
    "fta_probabilities",
    "sample_failure_events",
    "Scenario",
    "assemble_scenarios",
    "generate_scenarios",
    "write_scenarios",
    "read_scenarios",
]
