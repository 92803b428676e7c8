"""Data types flowing through an MFNNMC campaign."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..analysis.cost import CostLedger
from ..design import SampleDesign, ScalingTransform
from ..exceptions import InputError
from ..host.filesystem import ensure_dir
from ..nnet.network import NetworkParams
from ..nnet.training import TrainingHistory


class Method(str, Enum):
    MFNNMC = "MFNNMC"
    HFMC = "HFMC"


class Provenance(str, Enum):
    """Origin of a high-fidelity value in the augmented dataset."""

    SOLVER = "solver"
    NN1 = "nn1"


@dataclass(frozen=True)
class AugmentedDataset:
    """The M pairs (y, Q̂_HF) used to train NN2.

    Attributes:
        points: (M, d) parameter points in design order
        values: (M,) Q̂_HF values
        provenance: (M,) Provenance per pair
        domain: (d, 2) parameter bounds
    """

    points: np.ndarray
    values: np.ndarray
    provenance: np.ndarray
    domain: np.ndarray

    def __post_init__(self) -> None:
        if not (self.points.shape[0] == self.values.shape[0] == self.provenance.shape[0]):
            raise InputError(
                "Augmented dataset arrays differ in length",
                {"points": self.points.shape[0], "values": self.values.shape[0]},
            )

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def solver_mask(self) -> np.ndarray:
        return self.provenance == Provenance.SOLVER.value

    @property
    def n_solver(self) -> int:
        return int(np.count_nonzero(self.solver_mask))

    @property
    def n_nn1(self) -> int:
        return self.m - self.n_solver


@dataclass
class SurrogateBundle:
    """Trained two-level surrogate.

    Attributes:
        nn1: (scaled y, scaled Q_LF) -> Q_HF
        nn2: scaled y -> Q_HF
        scaling: Parameter domain onto the unit cube
        lf_scaling: Q_LF min/max over Y_I onto [0, 1]
        nn1_history: Training history of NN1 (None when loaded from checkpoint)
        nn2_history: Training history of NN2 (None when loaded from checkpoint)
    """

    nn1: Optional[NetworkParams]
    nn2: NetworkParams
    scaling: ScalingTransform
    lf_scaling: Optional[ScalingTransform] = None
    nn1_history: Optional[TrainingHistory] = None
    nn2_history: Optional[TrainingHistory] = None

    def __post_init__(self) -> None:
        dim = self.scaling.offset.shape[0]
        if self.nn2.arch.input_width != dim or self.nn2.arch.output_width != 1:
            raise InputError(
                "NN2 must map the parameter dimension to one output",
                {"dim": dim, "arch": self.nn2.arch.to_dict()},
            )
        if self.nn1 is not None and (
            self.nn1.arch.input_width != dim + 1 or self.nn1.arch.output_width != 1
        ):
            raise InputError(
                "NN1 must map (y, Q_LF) to one output",
                {"dim": dim, "arch": self.nn1.arch.to_dict()},
            )


@dataclass(frozen=True)
class EstimatorResult:
    """Outcome of one MFNNMC or HFMC estimation.

    Error fields are filled iff a reference is given.
    """

    estimate: float
    sample_variance: float
    n_samples: int
    method: Method
    reference: Optional[float] = None
    cost: Optional[CostLedger] = None
    moment: int = 1
    provenance: dict = field(default_factory=dict)
    error_abs: Optional[float] = field(init=False, default=None)
    error_rel: Optional[float] = field(init=False, default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        if self.sample_variance < 0:
            raise InputError("Sample variance must be >= 0", {"variance": self.sample_variance})
        if self.reference is not None:
            err = abs(self.estimate - self.reference)
            object.__setattr__(self, "error_abs", err)
            object.__setattr__(
                self, "error_rel", err / abs(self.reference) if self.reference != 0 else math.inf
            )

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "estimate": self.estimate,
            "sample_variance": self.sample_variance,
            "n_samples": self.n_samples,
            "moment": self.moment,
            "reference": self.reference,
            "error_abs": self.error_abs,
            "error_rel": self.error_rel,
            "cost": self.cost.to_dict() if self.cost is not None else None,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EstimatorResult":
        return cls(
            estimate=data["estimate"],
            sample_variance=data["sample_variance"],
            n_samples=data["n_samples"],
            method=Method(data["method"]),
            reference=data.get("reference"),
            cost=CostLedger.from_dict(data["cost"]) if data.get("cost") else None,
            moment=data.get("moment", 1),
            provenance=data.get("provenance", {}),
        )


def fidelity_frame(
    design: SampleDesign,
    lf_all: np.ndarray,
    hf_on_I: np.ndarray,
    augmented: Optional[AugmentedDataset] = None,
) -> pd.DataFrame:
    """Design points with Q_LF everywhere, Q_HF on Y_I (NaN elsewhere) and Q̂_HF."""
    frame = design.to_frame()
    frame["q_lf"] = lf_all
    q_hf = np.full(design.m, np.nan)
    q_hf[design.in_first] = hf_on_I
    frame["q_hf"] = q_hf
    if augmented is not None:
        frame["q_hat_hf"] = augmented.values
        frame["provenance"] = augmented.provenance
    return frame


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    p = Path(path)
    ensure_dir(p.parent)
    frame.to_csv(p, index=False, float_format="%.17g")
    return p
