"""Ihara and Bartholdi zeta functions of finite, periodic and self-similar graphs."""

__version__ = "0.1.0"

from .builders import (FIXTURES, GASKET, LATTICES, ExhaustionScheme, PeriodicSpec,
                       average_multiplicity, finite_family, gasket_exhaustion, periodic_lattice)
from .cycles import (brute_counts, closed_paths, cycle_classes, euler_product, path_stats,
                     primitive_cycle_classes)
from .errors import (AnalyticityViolation, BadParameter, BudgetExceeded, ConnectivityError,
                     ConvexHullViolation, CycleTooLarge, DomainError, FreenessViolation,
                     SimplicityError, SingularIntegrand, SingularPencil, WindowTooSmall, ZetaError)
from .functional import (RegionParams, clair_xi, clair_zeta, contour_xi, g_and_psi,
                         hole_extension_applicable, omega_disconnection_oracle, omega_membership,
                         omega_w_disconnects, xi_bartholdi, xi_ihara_spectral)
from .graph import Graph, ball, build_graph, frontier, read_edge_list
from .operators import (FiniteContext, PeriodicContext, SelfSimilarContext, a_sequence,
                        alpha_bound, b_sequence, tn_sequence, trace)
from .spectral import spectral_cdf, stieltjes_log_det
from .zeta import det_tau, euler_characteristic, log_zeta_series, verify_det_formula, zeta_eval

__all__ = [
    "FIXTURES", "GASKET", "LATTICES", "AnalyticityViolation", "BadParameter", "BudgetExceeded",
    "ConnectivityError", "ConvexHullViolation", "CycleTooLarge", "DomainError",
    "ExhaustionScheme", "FiniteContext", "FreenessViolation", "Graph", "PeriodicContext",
    "PeriodicSpec", "RegionParams", "SelfSimilarContext", "SimplicityError",
    "SingularIntegrand", "SingularPencil", "WindowTooSmall", "ZetaError", "__version__",
    "a_sequence", "alpha_bound", "average_multiplicity", "b_sequence", "ball", "brute_counts",
    "build_graph", "clair_xi", "clair_zeta", "closed_paths", "contour_xi", "cycle_classes",
    "det_tau", "euler_characteristic", "euler_product", "finite_family", "frontier",
    "g_and_psi", "gasket_exhaustion", "hole_extension_applicable", "log_zeta_series",
    "omega_disconnection_oracle", "omega_membership", "omega_w_disconnects", "path_stats",
    "periodic_lattice", "primitive_cycle_classes", "read_edge_list", "spectral_cdf",
    "stieltjes_log_det", "tn_sequence", "trace", "verify_det_formula", "xi_bartholdi",
    "xi_ihara_spectral", "zeta_eval",
]
