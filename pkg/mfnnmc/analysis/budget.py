"""Tolerance budgeting: splitting ε_TOL into bias and statistical parts.

With failure probability α and splitting parameter θ,

    bias:         C h_HF^q              ≤ (1 - θ) ε_TOL
    statistical:  c_α √(V[Q] / N)       ≤ θ ε_TOL,      c_α = Φ⁻¹(1 - α/2)

where in relative mode ε_TOL is scaled by |E[Q]| (the reference mean).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ..design import as_domain, draw_mc_samples
from ..exceptions import InputError, LadderExhaustedError
from ..models.catalog import ForwardModel
from .normal import inv_normal_cdf

logger = logging.getLogger(__name__)

# Relative slack so that a budget hit exactly (up to rounding) selects the ladder point
_BOUNDARY_SLACK = 1e-12


class ErrorMode(str, Enum):
    RELATIVE = "relative"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class ToleranceBudget:
    """Target tolerance and how it is split.

    Attributes:
        tol: ε_TOL
        theta: Fraction assigned to the statistical error, 0 < θ < 1
        alpha: Failure probability, 0 < α < 1
        error_mode: Relative or absolute error
    """

    tol: float
    theta: float = 0.5
    alpha: float = 0.01
    error_mode: ErrorMode = ErrorMode.RELATIVE

    def __post_init__(self) -> None:
        object.__setattr__(self, "error_mode", ErrorMode(self.error_mode))
        if not self.tol > 0:
            raise InputError("Tolerance must be positive", {"tol": self.tol})
        if not 0.0 < self.theta < 1.0:
            raise InputError("Splitting parameter must lie in (0, 1)", {"theta": self.theta})
        if not 0.0 < self.alpha < 1.0:
            raise InputError("Failure probability must lie in (0, 1)", {"alpha": self.alpha})

    @property
    def c_alpha(self) -> float:
        return inv_normal_cdf(1.0 - self.alpha / 2.0)

    def tol_abs(self, reference: float | None = None) -> float:
        """Absolute tolerance: ε_TOL·|reference| (relative) or ε_TOL (absolute)."""
        if self.error_mode is ErrorMode.ABSOLUTE:
            return self.tol
        if reference is None:
            raise InputError("Relative error mode needs a reference magnitude")
        value = self.tol * abs(reference)
        if not value > 0:
            raise InputError("Zero absolute tolerance", {"tol": self.tol, "reference": reference})
        return value

    def error_of(self, estimate: float, reference: float) -> float:
        """Error of an estimate measured in this budget's mode."""
        err = abs(estimate - reference)
        if self.error_mode is ErrorMode.RELATIVE:
            return err / abs(reference)
        return err


def select_h_hf(
    budget: ToleranceBudget,
    order_q: float,
    bias_constant: float,
    ladder: Sequence[float],
    reference: float | None = None,
) -> float:
    """Largest ladder h with C h^q ≤ (1 - θ)·tol_abs (boundary inclusive).

    Raises:
        InputError: If C <= 0 or the ladder is empty
        LadderExhaustedError: If even the finest ladder point is too coarse
    """
    if not bias_constant > 0:
        raise InputError("Bias constant must be positive", {"C": bias_constant})
    if not ladder:
        raise InputError("Empty step-size ladder")
    allowance = (1.0 - budget.theta) * budget.tol_abs(reference)
    for h in sorted(ladder, reverse=True):
        if bias_constant * h ** order_q <= allowance * (1.0 + _BOUNDARY_SLACK):
            return h
    finest = min(ladder)
    raise LadderExhaustedError(
        "No admissible h on the ladder meets the bias budget; extend the ladder with finer h",
        {
            "tol": budget.tol,
            "allowance": allowance,
            "finest_h": finest,
            "finest_bias": bias_constant * finest ** order_q,
            "suggested_h": (allowance / bias_constant) ** (1.0 / order_q),
        },
    )


def select_n_samples(
    budget: ToleranceBudget,
    variance_estimate: float,
    reference: float | None = None,
) -> int:
    """N = ⌈c_α² V / (θ·tol_abs)²⌉, at least 1."""
    if variance_estimate < 0 or not math.isfinite(variance_estimate):
        raise InputError("Variance estimate must be finite and >= 0", {"V": variance_estimate})
    stat = budget.theta * budget.tol_abs(reference)
    n = math.ceil(budget.c_alpha ** 2 * variance_estimate / (stat * stat))
    return max(1, int(n))


def statistical_error_bound(budget: ToleranceBudget, variance: float, n: int) -> float:
    """c_α √(V/N)."""
    return budget.c_alpha * math.sqrt(variance / n)


def calibrate_bias_constant(
    model: ForwardModel,
    h_values: Sequence[float],
    n_draws: int = 50,
    seed: int = 0,
) -> float:
    """Fit C in |Q - Q_h| ≤ C h^q from the max error over random draws.

    Returns the largest of max_y |Q_h(y) - Q(y)| / h^q over the given h.
    """
    points = draw_mc_samples(n_draws, as_domain(model.domain), seed)
    exact = model.qoi_exact(points)
    ratios = []
    for h in h_values:
        err = float(np.max(np.abs(model.qoi(points, h) - exact)))
        ratios.append(err / h ** model.order_q)
        logger.info("bias calibration %s h=%g: max error %.3e", model.model_id.value, h, err)
    constant = max(ratios)
    if not constant > 0:
        raise InputError("Calibrated bias constant is zero", {"h_values": list(h_values)})
    return constant
