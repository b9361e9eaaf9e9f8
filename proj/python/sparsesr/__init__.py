"""Sparse real stability radius of A + B Delta C."""

from ._core import (
    BruteForceResult,
    DescentMode,
    MultistartResult,
    OptimalityReport,
    PatternResult,
    ProblemInstance,
    SolveResult,
    SolverConfig,
    StepRule,
    SweepRow,
    Termination,
    brute_force_sr,
    build_network,
    certify,
    load_problem,
    multistart,
    parse_problem,
    rank_critical_edges,
    sample_spectral_set,
    solve,
    solve_omega_zero,
    spectral_abscissa,
    weight_sweep,
)
from ._core import Error, NotBoundaryPointError, ParseError, StabilityAssumptionError
from ._core import __version__

__all__ = [name for name in dir() if not name.startswith("_")]
