"""Simulator for pairwise output-field entanglement in a two-pump, n-probe
optomechanical cavity.

Pipeline: lab parameters -> derived coefficients -> classical working point
-> linearized quadrature dynamics -> output-field spectral covariance ->
pairwise correlations, with Lyapunov/quadrature and Monte-Carlo oracles and a
sweep/CSV/gnuplot layer on top. See the README for the YAML schema and CLI.
"""
from .config import (
    Config,
    ConfigError,
    MonteCarloSettings,
    load_config,
    parse_config,
)
from .constants import CODATA_2018, PhysicalConstants
from .dynamics import (
    LinearSystem,
    ModeIndex,
    NoiseModel,
    StabilityReport,
    build_linear_system,
    build_noise_model,
    check_stability,
    dump_matrices,
)
from .oracle import (
    InstabilityDetectedError,
    LyapunovSolution,
    PairEstimate,
    SingularLyapunovError,
    TrajectoryStats,
    UnstableSystemError,
    lyapunov_covariance,
    simulate_time_domain,
    spectral_integral_covariance,
)
from .params import (
    DerivedParams,
    DetuningSpec,
    ParamValidationError,
    PhysicalParams,
    derive_params,
    thermal_occupancy,
    validation_warnings,
)
from .spectrum import (
    DuanCorrelation,
    SingularAtFrequencyError,
    SpectralResult,
    VerdictReport,
    duan_best,
    duan_correlation,
    multipartite_verdict,
    output_spectral_matrix,
)
from .sweep import (
    AXIS_NAMES,
    AxisSpec,
    SweepRow,
    SweepSpec,
    conventional_sign,
    emit_gnuplot_script,
    mode_tag,
    resolve_working_point,
    run_sweep,
    write_csv,
)
from .working_point import (
    NonConvergenceError,
    WorkingPoint,
    delta0_for,
    solve_direct,
    solve_self_consistent,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_NAMES",
    "AxisSpec",
    "CODATA_2018",
    "Config",
    "ConfigError",
    "DerivedParams",
    "DetuningSpec",
    "DuanCorrelation",
    "InstabilityDetectedError",
    "LinearSystem",
    "LyapunovSolution",
    "ModeIndex",
    "MonteCarloSettings",
    "NoiseModel",
    "NonConvergenceError",
    "PairEstimate",
    "ParamValidationError",
    "PhysicalConstants",
    "PhysicalParams",
    "SingularAtFrequencyError",
    "SingularLyapunovError",
    "SpectralResult",
    "StabilityReport",
    "SweepRow",
    "SweepSpec",
    "TrajectoryStats",
    "UnstableSystemError",
    "VerdictReport",
    "WorkingPoint",
    "build_linear_system",
    "build_noise_model",
    "check_stability",
    "conventional_sign",
    "delta0_for",
    "derive_params",
    "duan_best",
    "duan_correlation",
    "dump_matrices",
    "emit_gnuplot_script",
    "load_config",
    "lyapunov_covariance",
    "mode_tag",
    "multipartite_verdict",
    "output_spectral_matrix",
    "parse_config",
    "resolve_working_point",
    "run_sweep",
    "simulate_time_domain",
    "solve_direct",
    "solve_self_consistent",
    "spectral_integral_covariance",
    "thermal_occupancy",
    "validation_warnings",
    "write_csv",
    "__version__",
]
