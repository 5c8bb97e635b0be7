"""BOIN/Keyboard drug-combination dose finding with data-dependent early
completion (DRP and DRP-I) and bivariate-isotonic MTD selection."""

from .completion import (
    BoundaryStatus,
    CompletionConfig,
    CompletionVariant,
    beta_binom_pmf,
    completion_table,
    drp,
    drp_i,
)
from .design import (
    Boundaries,
    Decision,
    DesignKind,
    DesignParams,
    ParameterError,
    RetainmentSet,
    boin_boundaries,
    decide,
    decision_table,
    eliminate_test,
    interval_posterior_prob,
    retainment_set,
)
from .engine import (
    StateError,
    TrialState,
    TrialStatus,
    apply_cohort,
    next_dose,
    select_mtd,
    state_from_dict,
    state_to_dict,
)
from .isotonic import Direction, bivariate_isotonic, pava_1d
from .simulate import DesignArm, Metrics, Scenario, SimConfig, run_trial, simulate

__version__ = "0.1.0"

__all__ = [
    "Boundaries",
    "BoundaryStatus",
    "CompletionConfig",
    "CompletionVariant",
    "Decision",
    "DesignArm",
    "DesignKind",
    "DesignParams",
    "Direction",
    "Metrics",
    "ParameterError",
    "RetainmentSet",
    "Scenario",
    "SimConfig",
    "StateError",
    "TrialState",
    "TrialStatus",
    "apply_cohort",
    "beta_binom_pmf",
    "bivariate_isotonic",
    "boin_boundaries",
    "completion_table",
    "decide",
    "decision_table",
    "drp",
    "drp_i",
    "eliminate_test",
    "interval_posterior_prob",
    "next_dose",
    "pava_1d",
    "retainment_set",
    "run_trial",
    "select_mtd",
    "simulate",
    "state_from_dict",
    "state_to_dict",
]
