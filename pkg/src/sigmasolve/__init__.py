"""Exact solver for the divisor-sum equation a*sigma(n) = b*n + c."""

from .engine import (
    PartialReport,
    SolutionReport,
    Stats,
    VerifyResult,
    merge,
    solve,
    verify,
)
from .model import (
    Constraints,
    Equation,
    InfiniteFamily,
    InvalidEquationError,
    Solution,
    UnsatisfiableConstraintsError,
)
from .numtheory import FactorizationBudgetError
from .oracle import brute_solve

__version__ = "0.1.0"

__all__ = [
    "Constraints",
    "Equation",
    "FactorizationBudgetError",
    "InfiniteFamily",
    "InvalidEquationError",
    "PartialReport",
    "Solution",
    "SolutionReport",
    "Stats",
    "UnsatisfiableConstraintsError",
    "VerifyResult",
    "brute_solve",
    "merge",
    "solve",
    "verify",
    "__version__",
]
