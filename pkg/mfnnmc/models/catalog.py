"""Model catalog keyed by model id.

Each ForwardModel bundles what the pipeline, analysis and CLI need to know
about a parametric problem: parameter domain, QoI at a given discretization
length, the exact QoI oracle, convergence order q, cost exponent γ
(work per solve ∝ h^{-γ}) and the admissible ladder of high-fidelity h.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from ..exceptions import ConfigurationError, InputError
from .ode import DEFAULT_ODE, ode_qoi, ode_qoi_exact, ode_step_count
from .wave import DEFAULT_WAVE, wave_grid, wave_qoi, wave_qoi_exact

logger = logging.getLogger(__name__)


class ModelId(str, Enum):
    """Built-in models."""

    ODE15 = "ode15"
    WAVE16 = "wave16"


@dataclass(frozen=True)
class ForwardModel:
    """A parametric forward model with low/high-fidelity QoI evaluation.

    Attributes:
        model_id: Catalog key
        dim: Number of random parameters
        domain: (dim, 2) array of [lo, hi] bounds
        order_q: Convergence order of the solver
        gamma: Cost exponent, W ∝ h^{-γ}
        h_ladder: Admissible high-fidelity lengths, coarse to fine
        qoi_fn: (points (n, dim), h) -> (n,) QoI values
        qoi_exact_fn: points (n, dim) -> (n,) exact QoI values
        check_h: Raises InputError for inadmissible h
    """

    model_id: ModelId
    dim: int
    domain: np.ndarray
    order_q: float
    gamma: float
    h_ladder: tuple[float, ...]
    qoi_fn: Callable[[np.ndarray, float], np.ndarray]
    qoi_exact_fn: Callable[[np.ndarray], np.ndarray]
    check_h: Callable[[float], None]

    def qoi(self, points: np.ndarray, h: float) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        return np.asarray(self.qoi_fn(pts, h), dtype=np.float64).reshape(-1)

    def qoi_exact(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        return np.asarray(self.qoi_exact_fn(pts), dtype=np.float64).reshape(-1)


@dataclass(frozen=True)
class BiFidelitySpec:
    """Low/high-fidelity pair of discretization lengths for one model.

    Attributes:
        h_lf: Coarse length
        h_hf: Fine length
        order_q: Convergence order q
        model_id: Catalog key
    """

    h_lf: float
    h_hf: float
    model_id: ModelId
    order_q: float = 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "model_id", ModelId(self.model_id))
        errors = []
        if not self.h_lf > 0 or not self.h_hf > 0:
            errors.append({"field": "h", "error": "h_lf and h_hf must be positive"})
        elif self.h_hf > self.h_lf:
            errors.append({"field": "h_hf", "error": f"h_hf={self.h_hf} must not exceed h_lf={self.h_lf}"})
        if errors:
            raise ConfigurationError("Invalid bi-fidelity spec", {"errors": errors})
        if self.h_hf == self.h_lf:
            logger.warning("h_hf == h_lf: low and high fidelity coincide")

    @property
    def model(self) -> ForwardModel:
        return get_model(self.model_id)

    def q_lf(self, points: np.ndarray) -> np.ndarray:
        return self.model.qoi(points, self.h_lf)

    def q_hf(self, points: np.ndarray) -> np.ndarray:
        return self.model.qoi(points, self.h_hf)


def _check_ode_h(h: float) -> None:
    ode_step_count(h, DEFAULT_ODE)


def _check_wave_h(h: float) -> None:
    wave_grid(h, DEFAULT_WAVE)


MODEL_CATALOG: dict[ModelId, ForwardModel] = {
    ModelId.ODE15: ForwardModel(
        model_id=ModelId.ODE15,
        dim=1,
        domain=np.array([DEFAULT_ODE.domain]),
        order_q=2.0,
        gamma=1.0,
        h_ladder=(0.1, 0.05, 0.025, 0.0125, 0.01),
        qoi_fn=lambda pts, h: ode_qoi(pts[:, 0], h),
        qoi_exact_fn=lambda pts: ode_qoi_exact(pts[:, 0]),
        check_h=_check_ode_h,
    ),
    ModelId.WAVE16: ForwardModel(
        model_id=ModelId.WAVE16,
        dim=2,
        domain=np.array(DEFAULT_WAVE.domain),
        order_q=2.0,
        gamma=3.0,
        h_ladder=(1 / 20, 1 / 32, 1 / 64, 1 / 128, 1 / 160, 1 / 320),
        qoi_fn=lambda pts, h: wave_qoi(pts, h),
        qoi_exact_fn=lambda pts: wave_qoi_exact(pts),
        check_h=_check_wave_h,
    ),
}


def get_model(model_id: ModelId | str) -> ForwardModel:
    """Look up a model by id.

    Raises:
        InputError: If the id is unknown
    """
    try:
        return MODEL_CATALOG[ModelId(model_id)]
    except ValueError as e:
        raise InputError(
            f"Unknown model id: {model_id!r}", {"known": [m.value for m in ModelId]}
        ) from e
