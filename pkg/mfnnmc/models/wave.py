"""2D wave equation with a manufactured solution.

    u_tt - Δu = f   on [0, T] × D × Γ,  D = [-1, 1]²,  Γ = [10, 11] × [4, 6],
    u(0) = g1,  u_t(0) = g2,  u = g_b on ∂D,

with data chosen so that u(t, x, y) = sin(y1 t - y2 x1) sin(y2 x2).
Since u_tt = -y1² u and Δu = -2 y2² u, the forcing is f = (2 y2² - y1²) u.

SOLVER:
Second-order leapfrog on a uniform grid of length h with Δt = h/2 and the
5-point Laplacian. The first step uses a second-order Taylor start; Dirichlet
values are imposed from the exact solution at t^{n+1} after each interior
update. The quantity of interest is Q(y) = |u(T, x_Q, y)|, T = 30,
x_Q = (0.5, 0.5).

The solver is vectorized over a batch of parameter points: fields have
shape (B, n+1, n+1) with axis 1 indexing x1 and axis 2 indexing x2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError

# Upper bound on B·(n+1)² per solver batch, keeps three fields near 100 MB
WAVE_BATCH_NODES = 4_000_000


@dataclass(frozen=True)
class WaveSpec:
    """Fixed problem data.

    Attributes:
        horizon: Final time T
        probe: Point x_Q at which u(T) is read
        domain: Parameter rectangle Γ as ((y1 lo, y1 hi), (y2 lo, y2 hi))
        dt_ratio: Δt / h
    """

    horizon: float = 30.0
    probe: tuple[float, float] = (0.5, 0.5)
    domain: tuple[tuple[float, float], tuple[float, float]] = ((10.0, 11.0), (4.0, 6.0))
    dt_ratio: float = 0.5


DEFAULT_WAVE = WaveSpec()


@dataclass(frozen=True)
class WaveGrid:
    """Grid geometry for one h.

    Attributes:
        h: Grid length
        n: Number of intervals per direction (2/h)
        x: Node coordinates (n+1,), exactly antisymmetric about the origin
        probe_index: (i, j) index of x_Q
        dt: Time step
        steps: Number of time steps to reach T
    """

    h: float
    n: int
    x: np.ndarray
    probe_index: tuple[int, int]
    dt: float
    steps: int


def _integral(value: float, what: str, h: float) -> int:
    k = int(round(value))
    if abs(value - k) > 1e-9 * max(1.0, abs(value)):
        raise InputError(f"{what} is not integral for h={h}", {"h": h, "value": value})
    return k


def wave_grid(h: float, spec: WaveSpec = DEFAULT_WAVE) -> WaveGrid:
    """Validate h and build the grid.

    Raises:
        InputError: If h <= 0, 1/h is not integral (origin and x_Q off-grid),
            x_Q is not a node, or T/Δt is not integral
    """
    if not h > 0:
        raise InputError("Grid length must be positive", {"h": h})
    half = _integral(1.0 / h, "1/h (grid misaligned with the origin)", h)
    n = 2 * half
    x = (np.arange(n + 1) - half) * h
    probe_index = tuple(
        half + _integral(p / h, "x_Q/h (probe off-grid)", h) for p in spec.probe
    )
    dt = spec.dt_ratio * h
    steps = _integral(spec.horizon / dt, "T/Δt", h)
    return WaveGrid(h=h, n=n, x=x, probe_index=probe_index, dt=dt, steps=steps)


def wave_exact(t, x, y):
    """u(t, x, y) = sin(y1 t - y2 x1) sin(y2 x2).

    Args:
        t: Time
        x: (x1, x2), scalars or broadcastable arrays
        y: (y1, y2), scalars or broadcastable arrays
    """
    x1, x2 = (np.asarray(c, dtype=np.float64) for c in x)
    y1, y2 = (np.asarray(c, dtype=np.float64) for c in y)
    value = np.sin(y1 * t - y2 * x1) * np.sin(y2 * x2)
    return value[()] if np.ndim(value) == 0 else value


def wave_forcing(t, x, y):
    """f = u_tt - Δu = (2 y2² - y1²) u."""
    y1, y2 = (np.asarray(c, dtype=np.float64) for c in y)
    value = (2.0 * y2 * y2 - y1 * y1) * wave_exact(t, x, y)
    return value[()] if np.ndim(value) == 0 else value


def _as_batch(y) -> np.ndarray:
    ys = np.asarray(y, dtype=np.float64)
    if ys.ndim == 1:
        ys = ys.reshape(1, 2)
    if ys.ndim != 2 or ys.shape[1] != 2:
        raise InputError("Wave parameters must be (y1, y2) pairs", {"shape": list(np.shape(y))})
    return ys


def wave_solve_field(y, h: float, spec: WaveSpec = DEFAULT_WAVE) -> tuple[WaveGrid, np.ndarray]:
    """Run the leapfrog scheme to T and return the full final field.

    Args:
        y: One (y1, y2) pair or a (B, 2) array of pairs
        h: Grid length

    Returns:
        (grid, field of shape (B, n+1, n+1))
    """
    grid = wave_grid(h, spec)
    ys = _as_batch(y)
    y1 = ys[:, 0][:, None, None]
    y2 = ys[:, 1][:, None, None]
    x1 = grid.x[None, :, None]
    x2 = grid.x[None, None, :]
    dt = grid.dt
    inv_h2 = 1.0 / (h * h)
    coeff = 2.0 * y2 * y2 - y1 * y1
    # u is separable: sin(y1 t - y2 x1) * sin(y2 x2)
    spatial2 = np.sin(y2 * x2)

    def exact_at(t: float) -> np.ndarray:
        return np.sin(y1 * t - y2 * x1) * spatial2

    def laplacian(u: np.ndarray) -> np.ndarray:
        return (
            u[:, 2:, 1:-1] + u[:, :-2, 1:-1] + u[:, 1:-1, 2:] + u[:, 1:-1, :-2] - 4.0 * u[:, 1:-1, 1:-1]
        ) * inv_h2

    def impose_boundary(u: np.ndarray, t: float) -> None:
        u_b = exact_at(t)
        u[:, 0, :] = u_b[:, 0, :]
        u[:, -1, :] = u_b[:, -1, :]
        u[:, :, 0] = u_b[:, :, 0]
        u[:, :, -1] = u_b[:, :, -1]

    u_prev = exact_at(0.0)
    g2 = y1 * np.cos(y1 * 0.0 - y2 * x1) * spatial2
    f0 = coeff * u_prev

    u_curr = u_prev.copy()
    u_curr[:, 1:-1, 1:-1] = (
        u_prev[:, 1:-1, 1:-1]
        + dt * g2[:, 1:-1, 1:-1]
        + 0.5 * dt * dt * (laplacian(u_prev) + f0[:, 1:-1, 1:-1])
    )
    impose_boundary(u_curr, dt)

    u_next = np.empty_like(u_curr)
    for k in range(1, grid.steps):
        t = k * dt
        forcing = coeff * exact_at(t)
        u_next[:, 1:-1, 1:-1] = (
            2.0 * u_curr[:, 1:-1, 1:-1]
            - u_prev[:, 1:-1, 1:-1]
            + dt * dt * (laplacian(u_curr) + forcing[:, 1:-1, 1:-1])
        )
        impose_boundary(u_next, t + dt)
        u_prev, u_curr, u_next = u_curr, u_next, u_prev

    return grid, u_curr


def wave_solve_fd(y, h: float, spec: WaveSpec = DEFAULT_WAVE):
    """u_h(T, x_Q, y); scalar for one pair, (B,) array for a batch."""
    ys = np.asarray(y, dtype=np.float64)
    single = ys.ndim == 1
    batch = _as_batch(ys)
    grid = wave_grid(h, spec)
    chunk = max(1, WAVE_BATCH_NODES // ((grid.n + 1) ** 2))
    out = np.empty(batch.shape[0])
    i, j = grid.probe_index
    for start in range(0, batch.shape[0], chunk):
        _, field = wave_solve_field(batch[start:start + chunk], h, spec)
        out[start:start + chunk] = field[:, i, j]
    return float(out[0]) if single else out


def wave_qoi(y, h: float, spec: WaveSpec = DEFAULT_WAVE):
    """Q_h(y) = |u_h(T, x_Q, y)|."""
    return np.abs(wave_solve_fd(y, h, spec))


def wave_qoi_exact(y, spec: WaveSpec = DEFAULT_WAVE):
    """Q(y) = |u(T, x_Q, y)|."""
    ys = np.asarray(y, dtype=np.float64)
    value = np.abs(wave_exact(spec.horizon, spec.probe, (ys[..., 0], ys[..., 1])))
    return value[()] if np.ndim(value) == 0 else value
