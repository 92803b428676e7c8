"""Tolerance budgeting, cost accounting, compliance and reference moments."""

from .budget import (
    ErrorMode,
    ToleranceBudget,
    calibrate_bias_constant,
    select_h_hf,
    select_n_samples,
    statistical_error_bound,
)
from .compliance import ComplianceReport, check_tolerance_compliance, required_compliant
from .cost import (
    LEDGER_TERMS,
    CostLedger,
    LedgerCounts,
    UnitCosts,
    build_ledger,
    fit_cost_line,
    fit_cost_slope,
    per_unit,
)
from .normal import inv_normal_cdf, normal_cdf, normal_pdf
from .quadrature import integrate_abs_1d, ode_reference_mean, reference_mean, wave_reference_mean

__all__ = [
    "ErrorMode",
    "ToleranceBudget",
    "calibrate_bias_constant",
    "select_h_hf",
    "select_n_samples",
    "statistical_error_bound",
    "ComplianceReport",
    "check_tolerance_compliance",
    "required_compliant",
    "LEDGER_TERMS",
    "CostLedger",
    "LedgerCounts",
    "UnitCosts",
    "build_ledger",
    "fit_cost_line",
    "fit_cost_slope",
    "per_unit",
    "inv_normal_cdf",
    "normal_cdf",
    "normal_pdf",
    "integrate_abs_1d",
    "ode_reference_mean",
    "reference_mean",
    "wave_reference_mean",
]
