"""Finite-support optimal transport under relativistic cost functions.

Costs have the form c_t(x, y) = h((y - x) / t) with h strictly convex and
bounded on a convex body, +inf outside it, and h(0) = 0.  The package
computes exact optimal plans with dual certificates, the critical time, the
sampled cost curve, directional-derivative diagnostics on the boundary of
the body, and the alternating-chain decomposition of coupling pairs.
"""

from .bodies import ConvexBody, ball, body_from_spec, box, custom, ellipsoid
from .chain import ChainCertificate, chain_decompose, check_chain_certificate
from .costs import (CostModel, brenier, cost, cost_family, cost_model_from_spec,
                    custom_cost, finite_slope_demo, quadratic_ball)
from .discretize import density_from_spec, discretize_density, measure_from_spec
from .errors import (ChainSearchFailure, ConvexityViolation, DimensionMismatch,
                     InfeasibleResult, InvalidTime, MarginalMismatch,
                     NotInternalDirection, NotOnBoundary, RelotError)
from .experiments import (ExperimentConfig, RefinementReport, emit_report,
                          run_continuity_experiment, run_theta_experiment)
from .measures import DiscreteMeasure, dirac, measure_from_csv
from .plans import (TransportPlan, compose, identity_plan, marginals,
                    plan_from_json, plan_to_json, product_plan, restrict)
from .slopes import (HighlyRelativisticReport, SlopeClassification,
                     default_schedule, directional_slope, is_highly_relativistic,
                     is_theta_direction)
from .solver import (CostCurve, OTInstance, SolveResult, ThetaMassResult,
                     check_complementary_slackness, cost_curve, critical_time,
                     feasible, solve, theta_mass)
from .values import Cost, Slope

__version__ = "0.1.0"

__all__ = [
    "ConvexBody", "ball", "box", "ellipsoid", "custom", "body_from_spec",
    "CostModel", "cost", "brenier", "quadratic_ball", "finite_slope_demo",
    "custom_cost", "cost_family", "cost_model_from_spec",
    "Cost", "Slope",
    "SlopeClassification", "HighlyRelativisticReport", "default_schedule",
    "directional_slope", "is_theta_direction", "is_highly_relativistic",
    "DiscreteMeasure", "dirac", "measure_from_csv",
    "TransportPlan", "identity_plan", "product_plan", "marginals", "restrict",
    "compose", "plan_to_json", "plan_from_json",
    "ChainCertificate", "chain_decompose", "check_chain_certificate",
    "OTInstance", "SolveResult", "CostCurve", "ThetaMassResult",
    "feasible", "critical_time", "solve", "cost_curve", "theta_mass",
    "check_complementary_slackness",
    "discretize_density", "density_from_spec", "measure_from_spec",
    "ExperimentConfig", "RefinementReport", "run_continuity_experiment",
    "run_theta_experiment", "emit_report",
    "RelotError", "DimensionMismatch", "InvalidTime", "NotInternalDirection",
    "NotOnBoundary", "MarginalMismatch", "ConvexityViolation",
    "ChainSearchFailure", "InfeasibleResult",
]
