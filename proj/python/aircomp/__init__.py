"""Receive beamforming for over-the-air computation."""

from ._core import (
    AggregateRow,
    BeamformingSolution,
    ConfigError,
    DegenerateChannelError,
    ExperimentConfig,
    ExperimentRecord,
    FadingConfig,
    GeometryConfig,
    LinkBudget,
    SolverDiagnostics,
    SolverError,
    SolverOptions,
    SystemConfig,
    ValidationReport,
    ValidationRow,
    aggregate,
    analytic_mse,
    denoising_factor,
    direct_sca,
    parse_config_file,
    parse_config_text,
    run_sweep,
    sample_channel,
    solve,
    transmit_scalars,
    validate,
)

ALGORITHMS = ("direct-sdr", "direct-sca", "sdr-opt", "sca-opt")

__all__ = [name for name in dir() if not name.startswith("_")]
