"""Distortion bounds for relaying a correlated Gaussian source.

A memoryless source pair (S1, S2) with unit variances and correlation
rho is observed by a source terminal (S1) and a relay (S2).  The source
talks to relay and destination over Gaussian links; the relay assists
over its own Gaussian link.  Everything here computes squared-error
distortion of S1 at the destination: closed-form achievable schemes,
their jointly optimized hybrid variants, a cut-set lower bound, and a
finite-alphabet feasibility checker for the discrete counterpart.
"""

from .boxmin import BoxSearchConfig, minimize_box
from .dm import (
    AchievabilityReport,
    ConditionCheck,
    DmChannel,
    DmProblem,
    JointPmf,
    ProblemFormatError,
    SearchBudgetError,
    SearchResult,
    TestChannel,
    check_achievability,
    conditional_mutual_information,
    load_problem,
    min_distortion_search,
    optimal_reconstruction,
    parse_problem,
    simplex_grid,
)
from .gauss import (
    DegenerateScenarioError,
    GaussianLinearModel,
    GaussScenario,
    InvalidCovarianceError,
    LinkSnrs,
    conditional_variance_given_sideinfo,
    db_to_linear,
    linear_to_db,
    mmse_variance,
    scenario_from_snrs,
)
from .schemes import (
    EvalResult,
    SchemeId,
    classic_cf,
    classic_df,
    cutset_lower_bound,
    direct_transmission,
    evaluate,
    hjdf,
    hjdf_at,
    hpjdf,
    hpjdf_at,
    jdf,
    jdf_at,
    pjdf,
    pjdf_at,
    uncoded_source_coop,
)

__version__ = "0.1.0"

__all__ = [
    "AchievabilityReport",
    "BoxSearchConfig",
    "ConditionCheck",
    "DegenerateScenarioError",
    "DmChannel",
    "DmProblem",
    "EvalResult",
    "GaussScenario",
    "GaussianLinearModel",
    "InvalidCovarianceError",
    "JointPmf",
    "LinkSnrs",
    "ProblemFormatError",
    "SchemeId",
    "SearchBudgetError",
    "SearchResult",
    "TestChannel",
    "check_achievability",
    "classic_cf",
    "classic_df",
    "conditional_mutual_information",
    "conditional_variance_given_sideinfo",
    "cutset_lower_bound",
    "db_to_linear",
    "direct_transmission",
    "evaluate",
    "hjdf",
    "hjdf_at",
    "hpjdf",
    "hpjdf_at",
    "jdf",
    "jdf_at",
    "linear_to_db",
    "load_problem",
    "min_distortion_search",
    "minimize_box",
    "mmse_variance",
    "optimal_reconstruction",
    "parse_problem",
    "pjdf",
    "pjdf_at",
    "scenario_from_snrs",
    "uncoded_source_coop",
]
