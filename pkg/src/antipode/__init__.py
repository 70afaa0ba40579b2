"""Distance distributions, bounds and antipodality on homogeneous metric spaces."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .groups import AutomorphismSet, compose, format_permutation, inverse, parse_permutation  # noqa: E402
from .metric import (  # noqa: E402
    AntipodalityReport,
    AverageMode,
    BoundsReport,
    DistanceDistribution,
    FiniteMetricSpace,
    Tier,
    antipodal_map,
    average_distance,
    bounds_from_distribution,
    check_bounds,
    classify_antipodality,
    detect_extremal_lower,
    detect_extremal_upper,
    diameter,
    distance_distribution,
    is_ultrametric,
    mu,
    symmetry_check,
    triangle_violation,
    validate_metric,
    verify_involution_properties,
)
from .graphs import (  # noqa: E402
    AbelianCayley,
    Graph,
    PermutationCayley,
    apsp_metric,
    bfs_distances,
    cayley,
    complete,
    cycle,
    hypercube,
    is_automorphism,
    path,
    petersen,
    star,
    transitive_distribution,
)
from .symmetry import (  # noqa: E402
    ColoredPartition,
    TransitivityVerdict,
    automorphism_search,
    find_mapping_automorphism,
    homogeneity_verdict,
    is_vertex_transitive,
    isometry_search,
    orbit_of,
    refine_colors,
)
from .continuous import (  # noqa: E402
    SampleEstimate,
    flat_torus_histogram,
    flat_torus_mean_distance,
    goodness_of_fit,
    mirror_symmetry_test,
    padic_average,
    padic_distance,
    padic_space,
    sample_sphere_mean_distance,
    sphere_distance_cdf,
    sphere_distance_histogram,
    statistical_bounds,
)
