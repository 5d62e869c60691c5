from .mechanisms import GaussianMean, Mechanism, RandomizedResponse
from .protocols import (
    AdversarySpec,
    AttackKind,
    ExperimentConfig,
    Regime,
    SimulationReport,
    calibrate_alpha,
    derive_rng,
    percentile_threshold_attack,
    run_ind_mia,
    run_mia_m,
)
from .studies import (
    CoverageResult,
    FidelityResult,
    SweepResult,
    cdf_distance,
    coverage_experiment,
    expected_tally,
    heuristic_fidelity,
    interval_for,
    sample_size_sweep,
)

__all__ = [
    "AdversarySpec",
    "AttackKind",
    "CoverageResult",
    "ExperimentConfig",
    "FidelityResult",
    "GaussianMean",
    "Mechanism",
    "RandomizedResponse",
    "Regime",
    "SimulationReport",
    "SweepResult",
    "calibrate_alpha",
    "cdf_distance",
    "coverage_experiment",
    "derive_rng",
    "expected_tally",
    "heuristic_fidelity",
    "interval_for",
    "percentile_threshold_attack",
    "run_ind_mia",
    "run_mia_m",
    "sample_size_sweep",
]
