"""Scalar decay ODE with a manufactured solution.

    u_t(t, y) + 0.5 u(t, y) = f(t, y),  t ∈ [0, T],  u(0, y) = g(y),

with y ~ U[-1, 1] and f, g chosen so that

    u(t, y) = 0.5 + 2 sin(12 y) + 6 sin(2t) sin(10 y) (1 + 2 y²).

The quantity of interest is Q(y) = |u(T, y)| with T = 100.

All functions accept scalar or array ``y`` and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError


@dataclass(frozen=True)
class OdeSpec:
    """Fixed problem data.

    Attributes:
        decay: Coefficient of u in the equation
        horizon: Final time T
        domain: Parameter interval Γ
    """

    decay: float = 0.5
    horizon: float = 100.0
    domain: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise InputError("ODE horizon must be positive", {"horizon": self.horizon})
        if not self.domain[0] < self.domain[1]:
            raise InputError("ODE parameter domain bounds must be ordered", {"domain": self.domain})


DEFAULT_ODE = OdeSpec()


def ode_exact(t, y):
    """u(t, y) = 0.5 + 2 sin(12y) + 6 sin(2t) sin(10y)(1 + 2y²)."""
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    value = 0.5 + 2.0 * np.sin(12.0 * y) + 6.0 * np.sin(2.0 * t) * np.sin(10.0 * y) * (1.0 + 2.0 * y * y)
    return value[()] if value.ndim == 0 else value


def ode_forcing(t, y, spec: OdeSpec = DEFAULT_ODE):
    """f = u_t + 0.5 u for the manufactured solution."""
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    u_t = 12.0 * np.cos(2.0 * t) * np.sin(10.0 * y) * (1.0 + 2.0 * y * y)
    value = u_t + spec.decay * ode_exact(t, y)
    return value[()] if np.ndim(value) == 0 else value


def ode_step_count(h: float, spec: OdeSpec = DEFAULT_ODE) -> tuple[int, float]:
    """Number of steps n = round(T/h) and the aligned step T/n."""
    if not h > 0:
        raise InputError("Time step must be positive", {"h": h})
    n = max(1, int(round(spec.horizon / h)))
    return n, spec.horizon / n


def ode_solve_rk2(y, h: float, spec: OdeSpec = DEFAULT_ODE):
    """u(T, y) by the explicit midpoint Runge-Kutta method.

    The step is aligned so the horizon is hit exactly (see ode_step_count).
    """
    n, dt = ode_step_count(h, spec)
    y = np.asarray(y, dtype=np.float64)
    u = np.array(ode_exact(0.0, y), dtype=np.float64)
    decay = spec.decay
    # y-dependent factors of the forcing are fixed over the integration
    base = 0.5 + 2.0 * np.sin(12.0 * y)
    osc = np.sin(10.0 * y) * (1.0 + 2.0 * y * y)

    def rhs(t: float, u_: np.ndarray) -> np.ndarray:
        exact = base + 6.0 * np.sin(2.0 * t) * osc
        forcing = 12.0 * np.cos(2.0 * t) * osc + decay * exact
        return forcing - decay * u_

    for k in range(n):
        t = k * dt
        k1 = rhs(t, u)
        u = u + dt * rhs(t + 0.5 * dt, u + 0.5 * dt * k1)
    return u[()] if u.ndim == 0 else u


def ode_qoi(y, h: float, spec: OdeSpec = DEFAULT_ODE):
    """Q_h(y) = |u_h(T, y)|."""
    return np.abs(ode_solve_rk2(y, h, spec))


def ode_qoi_exact(y, spec: OdeSpec = DEFAULT_ODE):
    """Q(y) = |u(T, y)| from the closed form."""
    return np.abs(ode_exact(spec.horizon, y))
