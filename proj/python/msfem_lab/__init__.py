"""Python bindings for the multiscale finite element lab."""

from ._core import (
    CSV_HEADER,
    RunConfig,
    StageError,
    effective_tensor,
    fit_rate,
    fit_resonance_model,
    format_double,
    load_config,
    parse_config,
    run_basis_dump,
    run_cell,
    run_convergence,
    run_jumps,
    validate_config,
)

__all__ = [
    "CSV_HEADER",
    "RunConfig",
    "StageError",
    "effective_tensor",
    "fit_rate",
    "fit_resonance_model",
    "format_double",
    "load_config",
    "parse_config",
    "run_basis_dump",
    "run_cell",
    "run_convergence",
    "run_jumps",
    "validate_config",
]
