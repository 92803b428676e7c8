"""Cost ledger and cost-vs-tolerance slope fits.

    W_MFNNMC = M W_LF + M_1 W_HF + W_T1 + M_2 W_P1 + W_T2 + N W_P2
    W_HFMC   = N W_HF
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..exceptions import InputError

LEDGER_TERMS = ("lf_solves", "hf_solves", "train_nn1", "predict_nn1", "train_nn2", "predict_nn2")


@dataclass(frozen=True)
class LedgerCounts:
    m: int = 0
    m1: int = 0
    m2: int = 0
    n: int = 0


@dataclass(frozen=True)
class UnitCosts:
    """Per-unit costs (seconds).

    Attributes:
        w_lf: One low-fidelity solve
        w_hf: One high-fidelity solve
        w_t1: Training NN1 (total)
        w_p1: One NN1 prediction
        w_t2: Training NN2 (total)
        w_p2: One NN2 prediction
    """

    w_lf: float = 0.0
    w_hf: float = 0.0
    w_t1: float = 0.0
    w_p1: float = 0.0
    w_t2: float = 0.0
    w_p2: float = 0.0


@dataclass(frozen=True)
class CostLedger:
    """The six MFNNMC cost terms plus the HFMC cost for the same N."""

    counts: LedgerCounts
    units: UnitCosts
    lf_solves: float
    hf_solves: float
    train_nn1: float
    predict_nn1: float
    train_nn2: float
    predict_nn2: float
    hfmc_total: float

    @property
    def mfnnmc_total(self) -> float:
        return (
            self.lf_solves
            + self.hf_solves
            + self.train_nn1
            + self.predict_nn1
            + self.train_nn2
            + self.predict_nn2
        )

    @property
    def training_total(self) -> float:
        """Everything except the N surrogate predictions."""
        return self.mfnnmc_total - self.predict_nn2

    def to_dict(self) -> dict:
        return {
            "counts": asdict(self.counts),
            "units": asdict(self.units),
            "terms": {name: getattr(self, name) for name in LEDGER_TERMS},
            "mfnnmc_total": self.mfnnmc_total,
            "hfmc_total": self.hfmc_total,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CostLedger":
        return build_ledger(LedgerCounts(**data["counts"]), UnitCosts(**data["units"]))


def build_ledger(counts: LedgerCounts, units: UnitCosts) -> CostLedger:
    """Assemble the ledger from counts and per-unit costs.

    Raises:
        InputError: If any count or time is negative
    """
    for name, value in {**asdict(counts), **asdict(units)}.items():
        if value < 0:
            raise InputError(f"Negative ledger entry: {name}", {name: value})
    return CostLedger(
        counts=counts,
        units=units,
        lf_solves=counts.m * units.w_lf,
        hf_solves=counts.m1 * units.w_hf,
        train_nn1=units.w_t1,
        predict_nn1=counts.m2 * units.w_p1,
        train_nn2=units.w_t2,
        predict_nn2=counts.n * units.w_p2,
        hfmc_total=counts.n * units.w_hf,
    )


def per_unit(total_seconds: float, count: int) -> float:
    """Average cost of one unit, 0 when nothing was done."""
    return total_seconds / count if count > 0 else 0.0


def fit_cost_line(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """(slope, intercept) of the least-squares line log(cost) = a + s·log(1/tol).

    Raises:
        InputError: With fewer than two distinct tolerances or non-positive values
    """
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if arr.shape[0] < 2:
        raise InputError("Need at least two (tol, cost) points", {"points": arr.tolist()})
    if np.any(arr <= 0):
        raise InputError("Tolerances and costs must be positive", {"points": arr.tolist()})
    x = np.log(1.0 / arr[:, 0])
    if np.ptp(x) == 0:
        raise InputError("Tolerances are not distinct", {"points": arr.tolist()})
    slope, intercept = np.polyfit(x, np.log(arr[:, 1]), 1)
    return float(slope), float(intercept)


def fit_cost_slope(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(cost) against log(1/tol)."""
    return fit_cost_line(points)[0]
