"""Parametric forward models with manufactured solutions.

- ode: decay ODE solved by midpoint RK2
- wave: 2D wave equation solved by leapfrog finite differences
- catalog: ForwardModel / BiFidelitySpec registry keyed by ModelId
"""

from .catalog import MODEL_CATALOG, BiFidelitySpec, ForwardModel, ModelId, get_model
from .ode import OdeSpec, ode_exact, ode_forcing, ode_qoi, ode_qoi_exact, ode_solve_rk2
from .wave import (
    WaveSpec,
    wave_exact,
    wave_forcing,
    wave_grid,
    wave_qoi,
    wave_qoi_exact,
    wave_solve_fd,
    wave_solve_field,
)

__all__ = [
    "MODEL_CATALOG",
    "BiFidelitySpec",
    "ForwardModel",
    "ModelId",
    "get_model",
    "OdeSpec",
    "ode_exact",
    "ode_forcing",
    "ode_qoi",
    "ode_qoi_exact",
    "ode_solve_rk2",
    "WaveSpec",
    "wave_exact",
    "wave_forcing",
    "wave_grid",
    "wave_qoi",
    "wave_qoi_exact",
    "wave_solve_fd",
    "wave_solve_field",
]
