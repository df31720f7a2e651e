"""Local graph clustering by compressive recovery of cluster indicators.

A cluster that is weakly connected to the rest of the graph makes its
indicator vector approximately sparse under the random-walk Laplacian.
The extraction step diffuses mass from a few seed nodes, keeps a small
candidate set, and recovers the indicator with subspace pursuit; the
semi-supervised and unsupervised pipelines wrap that step with random
probing and co-membership voting.
"""

from .datagen import (
    FeatureMatrix,
    SbmSpec,
    general_sbm,
    inject_outliers,
    knn_affinity,
    sample_sbm,
    symmetric_sbm,
    three_circles,
    three_lines,
    three_moons,
)
from .graph import Graph, LaplacianView, build_graph, induced_subgraph, rw_laplacian
from .lce import LceOutput, LceParams, lce
from .metrics import delta_l_spectral_norm, evaluate, jaccard, matched_accuracy, sbm_snr
from .pipelines import (
    ClusterAssignment,
    MultiResult,
    SslcConfig,
    SslcResult,
    UslcConfig,
    sslc_multi,
    sslc_single,
    uslc,
)
from .recovery import RecoveryResult, SensingProblem, least_squares_on_support, subspace_pursuit

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "FeatureMatrix",
    "Graph",
    "LaplacianView",
    "LceOutput",
    "LceParams",
    "MultiResult",
    "RecoveryResult",
    "SbmSpec",
    "SensingProblem",
    "SslcConfig",
    "SslcResult",
    "UslcConfig",
    "build_graph",
    "delta_l_spectral_norm",
    "evaluate",
    "general_sbm",
    "induced_subgraph",
    "inject_outliers",
    "jaccard",
    "knn_affinity",
    "lce",
    "least_squares_on_support",
    "matched_accuracy",
    "rw_laplacian",
    "sample_sbm",
    "sbm_snr",
    "sslc_multi",
    "sslc_single",
    "subspace_pursuit",
    "symmetric_sbm",
    "three_circles",
    "three_lines",
    "three_moons",
    "uslc",
    "__version__",
]
