"""Tolerance compliance over repeated runs.

A sweep passes at a tolerance if the number of runs with error ≤ ε_TOL is at
least ⌊(1 - α)·n⌋. For 20 runs and α = 0.01 that is 19: a single exceedance
is tolerated since its binomial probability is not negligible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Sequence

from ..exceptions import InputError
from .budget import ToleranceBudget

if TYPE_CHECKING:
    from ..pipeline.types import EstimatorResult


@dataclass(frozen=True)
class ComplianceReport:
    tol: float
    error_mode: str
    n_runs: int
    n_compliant: int
    fraction: float
    required: int
    passed: bool
    errors: tuple[float, ...]

    def to_dict(self) -> dict:
        data = asdict(self)
        data["errors"] = list(self.errors)
        return data


def required_compliant(n_runs: int, alpha: float) -> int:
    # small epsilon keeps e.g. 0.99·100 = 98.99999999 from flooring to 98
    return max(0, math.floor((1.0 - alpha) * n_runs + 1e-9))


def check_tolerance_compliance(
    results: Sequence["EstimatorResult"],
    budget: ToleranceBudget,
) -> ComplianceReport:
    """Fraction of runs meeting the tolerance and the pass/fail verdict.

    Raises:
        InputError: If there are no results or any result lacks a reference
    """
    if not results:
        raise InputError("No results to check")
    errors = []
    for i, result in enumerate(results):
        if result.reference is None:
            raise InputError("Result has no reference value", {"index": i})
        errors.append(budget.error_of(result.estimate, result.reference))
    n_compliant = sum(1 for e in errors if e <= budget.tol)
    required = required_compliant(len(errors), budget.alpha)
    return ComplianceReport(
        tol=budget.tol,
        error_mode=budget.error_mode.value,
        n_runs=len(errors),
        n_compliant=n_compliant,
        fraction=n_compliant / len(errors),
        required=required,
        passed=n_compliant >= required,
        errors=tuple(errors),
    )
