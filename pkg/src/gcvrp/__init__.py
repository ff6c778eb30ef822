"""Graphic capacitated vehicle routing: iterated tour partitioning over
graphic TSP tours, exact lower bounds and certificates, and exact oracles
for small instances."""

from .bounds import (
    BoundReport,
    BoundViolation,
    TourCertificate,
    ag_bound,
    bound_report,
    check_delta_inequality,
    itp_approximation_ratio,
    radius_cost,
    structure_bound,
    structure_slack,
    tour_certificate,
    tsp_cost_guarantees,
)
from .graph import (
    DistanceOracle,
    Instance,
    InstanceError,
    bfs_depot_distances,
    load_instance,
    pairwise_distance,
    parse_instance,
    serialize_instance,
)
from .instgen import random_connected, structured, tight_instance, tight_metadata, tight_solution
from .itp import ItpReport, itp, itp_with_report
from .matching import MatchingProblem, matching_dp, min_weight_perfect_matching
from .oracle import exact_cvrp, exact_cvrp_cost, exact_tour_cost, naive_cvrp
from .tour import (
    CvrpSolution,
    Tour,
    TspTour,
    ValidationReport,
    expand_metric_path,
    solution_from_json,
    solution_to_json,
    validate_solution,
)
from .tsp import TooLargeError, christofides, double_tree, exact_tsp, spanning_tree

__version__ = "0.1.0"
