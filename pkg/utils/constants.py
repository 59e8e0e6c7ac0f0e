"""Project-wide constants and simple predicates."""
from __future__ import annotations

# Numerical tolerances
EXACT_TOL: float = 1e-12
CLOSED_FORM_TOL: float = 1e-10
NORM_MATCH_TOL: float = 1e-6
POWER_ITERATION_TOL: float = 1e-10
POWER_ITERATION_MAX_ITER: int = 10_000
RANK_RELATIVE_TOL: float = 1e-9

# Output formatting
SIGNIFICANT_DIGITS: int = 12

# Model defaults
SFT_METRIC_BASE: int = 2
DEFAULT_SLOWDOWN: int = 16
DEFAULT_ORBIT_HORIZON: int = 64
GOLDEN_MATRIX: tuple[tuple[int, int], tuple[int, int]] = ((1, 1), (1, 0))

# Fit acceptance windows
COUNT_SLOPE_REL_TOL: float = 0.15
RATE_SLOPE_TOL: float = 0.15
SHIFT_RATE_SLOPE_TOL: float = 0.1
ENTROPY_SLACK: float = 0.2

# CLI exit codes
EXIT_OK: int = 0
EXIT_ASSERTION_FAILED: int = 1
EXIT_CONFIG: int = 2
EXIT_MODEL: int = 3
EXIT_COVER: int = 4
EXIT_CELL_EXHAUSTED: int = 5
EXIT_NOT_CONVERGED: int = 6

SUITE_NAMES: tuple[str, ...] = (
    "bracket-axioms",
    "covers",
    "partition",
    "sample",
    "isometry",
    "rank-one",
    "quasi-invariance",
    "rank-decay",
    "block-orthogonality",
    "convergence",
)


def is_known_suite(name: str) -> bool:
    """Return True if name is a verification suite the CLI can run."""
    return name.replace("_", "-") in SUITE_NAMES


def suite_key(name: str) -> str:
    """Normalize a suite name to its dashed CLI spelling."""
    return name.replace("_", "-").lower()


__all__ = [
    "EXACT_TOL",
    "CLOSED_FORM_TOL",
    "NORM_MATCH_TOL",
    "POWER_ITERATION_TOL",
    "POWER_ITERATION_MAX_ITER",
    "RANK_RELATIVE_TOL",
    "SIGNIFICANT_DIGITS",
    "SFT_METRIC_BASE",
    "DEFAULT_SLOWDOWN",
    "DEFAULT_ORBIT_HORIZON",
    "GOLDEN_MATRIX",
    "COUNT_SLOPE_REL_TOL",
    "RATE_SLOPE_TOL",
    "SHIFT_RATE_SLOPE_TOL",
    "ENTROPY_SLACK",
    "EXIT_OK",
    "EXIT_ASSERTION_FAILED",
    "EXIT_CONFIG",
    "EXIT_MODEL",
    "EXIT_COVER",
    "EXIT_CELL_EXHAUSTED",
    "EXIT_NOT_CONVERGED",
    "SUITE_NAMES",
    "is_known_suite",
    "suite_key",
]
