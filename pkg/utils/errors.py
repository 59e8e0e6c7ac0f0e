"""Exception hierarchy; each error knows the CLI exit code it maps to."""
from __future__ import annotations

from utils.constants import (
    EXIT_CELL_EXHAUSTED,
    EXIT_CONFIG,
    EXIT_COVER,
    EXIT_MODEL,
    EXIT_NOT_CONVERGED,
)


class SmaleLabError(Exception):
    exit_code: int = 1


class ConfigError(SmaleLabError, ValueError):
    exit_code = EXIT_CONFIG


class ModelError(SmaleLabError, ValueError):
    exit_code = EXIT_MODEL


class DegenerateInputError(SmaleLabError, ValueError):
    exit_code = EXIT_MODEL


class CoverError(SmaleLabError, ValueError):
    exit_code = EXIT_COVER


class CellExhaustedError(SmaleLabError, LookupError):
    exit_code = EXIT_CELL_EXHAUSTED

    def __init__(self, level: int, key, cap: int):
        self.level = level
        self.key = key
        self.cap = cap
        super().__init__(
            f"no admissible homoclinic point in cell ({level}, {key}) under cap {cap}; raise the cap"
        )


class NormNotConvergedError(SmaleLabError, ArithmeticError):
    exit_code = EXIT_NOT_CONVERGED

    def __init__(self, estimate: float, residual: float, iterations: int):
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(estimate {estimate:.12g}, residual {residual:.3e})"
        )
