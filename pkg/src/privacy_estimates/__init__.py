"""Interval estimates of empirical differential privacy from attack outcomes."""

from .errors import DegenerateInputError, DomainError, NumericalError, OutcomeFormatError
from .inference import (
    EpsilonDistribution,
    EpsilonInterval,
    IntervalFamily,
    JointRatePosterior,
    Method,
    ci_epsilon_interval,
    credible_interval,
    epsilon_distribution,
    joint_posterior,
    rate_intervals,
    rectangle_mass,
)
from .numeric import (
    QuadratureSpec,
    adaptive_integrate,
    beta_pdf,
    inverse_regularized_incomplete_beta,
    log_beta,
    regularized_incomplete_beta,
)
from .rates import (
    JEFFREYS_PRIOR,
    BetaPosterior,
    ConfusionTally,
    OutcomeRecord,
    RateInterval,
    Sidedness,
    clopper_pearson_interval,
    empirical_rates,
    jeffreys_interval,
    jeffreys_posterior,
    tally_from_outcomes,
)
from .region import (
    PrivacyParams,
    RatePoint,
    advantage_bound,
    box_max_containing,
    box_min_lower_bound,
    epsilon_lower_bound_point,
    in_region,
    in_region_mask,
    mia_advantage,
    min_epsilon_containing,
    region_band,
)

__version__ = "0.1.0"
