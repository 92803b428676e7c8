"""Reference moments E[Q^k] of the built-in models by quadrature.

Q is the absolute value of a smooth function, so it has kinks at the zeros of
that function. The integrand is split at those zeros (located by scanning for
sign changes and refining with Brent's method) and each smooth piece is
integrated with composite Gauss-Legendre.

For the wave model the y2-dependence of the probe value factorizes out of the
zero set only partially, so the outer y2 integral uses a 512-node rule and
the inner y1 integral is zero-split.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..exceptions import InputError
from ..models.catalog import ModelId
from ..models.ode import DEFAULT_ODE, ode_exact
from ..models.wave import DEFAULT_WAVE, wave_exact

logger = logging.getLogger(__name__)

SCAN_POINTS = 4001
PIECE_NODES = 32
MAX_PIECE_WIDTH = 0.05
WAVE_OUTER_NODES = 512


def _zeros(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, scan: int) -> list[float]:
    xs = np.linspace(lo, hi, scan)
    vals = np.asarray(fn(xs), dtype=np.float64)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(lambda s: float(fn(np.array([s]))[0]), xs[i], xs[i + 1], xtol=1e-15))
    roots.extend(float(xs[i]) for i in np.nonzero(vals == 0.0)[0])
    return sorted(set(roots))


def integrate_abs_1d(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    power: int = 1,
    scan: int = SCAN_POINTS,
    nodes: int = PIECE_NODES,
    max_width: float = MAX_PIECE_WIDTH,
) -> float:
    """∫_lo^hi |fn(s)|^power ds, split at the zeros of fn.

    fn must be vectorized over a 1D array.
    """
    if not lo < hi:
        raise InputError("Integration bounds must be ordered", {"lo": lo, "hi": hi})
    if power < 1:
        raise InputError("Moment order must be >= 1", {"power": power})
    breaks = [lo, *(z for z in _zeros(fn, lo, hi, scan) if lo < z < hi), hi]
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        pieces = max(1, int(np.ceil((b - a) / max_width)))
        edges = np.linspace(a, b, pieces + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        xs = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        ws = (half[:, None] * gw[None, :]).ravel()
        total += float(np.dot(ws, np.abs(fn(xs)) ** power))
    return total


def ode_reference_mean(moment: int = 1) -> float:
    """E[|u(T, y)|^k] for y ~ U(domain)."""
    lo, hi = DEFAULT_ODE.domain
    value = integrate_abs_1d(lambda y: ode_exact(DEFAULT_ODE.horizon, y), lo, hi, power=moment)
    return value / (hi - lo)


def wave_reference_mean(moment: int = 1, outer_nodes: int = WAVE_OUTER_NODES) -> float:
    """E[|u(T, x_Q, y)|^k] for y ~ U(Γ)."""
    (a1, b1), (a2, b2) = DEFAULT_WAVE.domain
    t, probe = DEFAULT_WAVE.horizon, DEFAULT_WAVE.probe
    gx, gw = np.polynomial.legendre.leggauss(outer_nodes)
    y2_nodes = 0.5 * (a2 + b2) + 0.5 * (b2 - a2) * gx
    inner = np.array([
        integrate_abs_1d(
            lambda y1, y2=y2: wave_exact(t, probe, (y1, np.full_like(y1, y2))),
            a1, b1, power=moment,
        )
        for y2 in y2_nodes
    ])
    value = 0.5 * (b2 - a2) * float(np.dot(gw, inner))
    return value / ((b1 - a1) * (b2 - a2))


@lru_cache(maxsize=None)
def reference_mean(model_id: ModelId | str, moment: int = 1) -> float:
    """Cached quadrature reference E[Q^k] for a catalog model."""
    model_id = ModelId(model_id)
    if model_id is ModelId.ODE15:
        value = ode_reference_mean(moment)
    else:
        value = wave_reference_mean(moment)
    logger.info("reference E[Q^%d] for %s = %.15g", moment, model_id.value, value)
    return value
