"""Property checks run by ``mfnnmc validate``.

No campaign is run and no network is trained. Each check returns a
CheckResult; the CLI exits nonzero if any check fails.

CHECKS:
- gradient: backprop against central differences on random networks of the
  four campaign architectures, per-coordinate relative error (ReLU kinks
  crossed by a difference stencil are detected from the activation pattern
  and skipped)
- ode_order, wave_order: observed order log2(e(2h)/e(h)) of the solvers
  against the manufactured solutions; the wave check runs the campaign
  horizon on the two finest campaign grids
- ode_residual, wave_residual: the forcing terms reproduce the equations
  for the closed-form solutions (finite differences in t and x)
- quantile: inverse normal CDF round trip and known quantiles
- ledger: cost ledger identity on the ODE 1e-2 parameter row
- budget: sample-size arithmetic and the statistical bound at the returned N
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis.budget import ErrorMode, ToleranceBudget, select_n_samples, statistical_error_bound
from .analysis.cost import LedgerCounts, UnitCosts, build_ledger
from .analysis.normal import inv_normal_cdf, normal_cdf
from .design import make_rng
from .models.ode import OdeSpec, ode_exact, ode_forcing, ode_solve_rk2
from .models.wave import WaveSpec, wave_exact, wave_forcing, wave_solve_fd
from .nnet.network import Architecture, NetworkParams, batch_loss_and_gradient, init_network

logger = logging.getLogger(__name__)

ORDER_BOUNDS = (1.7, 2.3)
GRADIENT_TOLERANCE = 1e-4
# denominator floor for gradient components that are zero or nearly so
GRADIENT_FLOOR = 1e-6
CHECK_ARCHITECTURES = {
    "ode-nn1": Architecture(input_width=2, hidden_widths=(20, 20, 20, 20), output_width=1),
    "ode-nn2": Architecture(input_width=1, hidden_widths=(20, 20, 20, 20), output_width=1),
    "wave-nn1": Architecture(input_width=3, hidden_widths=(30, 30, 30, 30), output_width=1),
    "wave-nn2": Architecture(input_width=2, hidden_widths=(30, 30, 30, 30), output_width=1),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


def _loss_and_pattern(params: NetworkParams, x: np.ndarray, t: np.ndarray) -> tuple[float, np.ndarray]:
    a = x
    pattern = []
    last = params.arch.num_layers - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        if i == last:
            a = z
        else:
            pattern.append(z > 0)
            a = np.maximum(z, 0.0)
    r = a - t
    return float(np.sum(r * r) / x.shape[0]), np.concatenate([p.ravel() for p in pattern])


def gradient_error(
    arch: Architecture,
    seed: int,
    batch: int = 4,
    coordinates: int = 60,
    step: float = 1e-4,
    floor: float = GRADIENT_FLOOR,
) -> float:
    """Max per-coordinate relative error of backprop against central differences.

    Each sampled coordinate k contributes |fd_k - g_k| / max(|g_k|, floor).
    With the activation pattern fixed the loss is quadratic along a single
    coordinate, so the central difference is exact up to rounding.
    """
    rng = make_rng(seed)
    params = init_network(arch, seed)
    # random nonzero biases so every layer's bias gradient is exercised
    params = NetworkParams.from_flat(arch, params.flat() + 0.1 * rng.standard_normal(params.num_parameters()))
    x = rng.uniform(0.0, 1.0, (batch, arch.input_width))
    t = rng.standard_normal((batch, arch.output_width))
    _, grads = batch_loss_and_gradient(params, x, t)
    g = grads.flat()
    theta = params.flat()
    idx = rng.choice(theta.size, size=min(coordinates, theta.size), replace=False)
    worst = 0.0
    for k in idx:
        plus, minus = theta.copy(), theta.copy()
        plus[k] += step
        minus[k] -= step
        lp, pp = _loss_and_pattern(NetworkParams.from_flat(arch, plus), x, t)
        lm, pm = _loss_and_pattern(NetworkParams.from_flat(arch, minus), x, t)
        if not np.array_equal(pp, pm):
            continue
        fd = (lp - lm) / (2.0 * step)
        worst = max(worst, abs(fd - g[k]) / max(abs(g[k]), floor))
    return worst


def check_gradients(cases: int = 50, seed: int = 0) -> CheckResult:
    errors = {}
    for name, arch in CHECK_ARCHITECTURES.items():
        errors[name] = max(gradient_error(arch, seed + c) for c in range(cases))
    worst = max(errors.values())
    return CheckResult("gradient", worst <= GRADIENT_TOLERANCE, {"max_relative_error": errors, "cases": cases})


def observed_order(error_coarse: float, error_fine: float) -> float:
    """log2(e(2h) / e(h))."""
    return math.log2(error_coarse / error_fine)


def check_ode_order(draws: int = 20, h: float = 0.025, seed: int = 1) -> CheckResult:
    spec = OdeSpec()
    y = make_rng(seed).uniform(*spec.domain, draws)
    exact = ode_exact(spec.horizon, y)
    e_coarse = float(np.max(np.abs(ode_solve_rk2(y, 2 * h, spec) - exact)))
    e_fine = float(np.max(np.abs(ode_solve_rk2(y, h, spec) - exact)))
    order = observed_order(e_coarse, e_fine)
    lo, hi = ORDER_BOUNDS
    return CheckResult(
        "ode_order", lo <= order <= hi, {"order": order, "h": h, "errors": [e_coarse, e_fine]}
    )


def check_wave_order(
    draws: int = 20, h: float = 1 / 128, horizon: float | None = None, seed: int = 2
) -> CheckResult:
    """Mean over draws of log2(|e_2h| / |e_h|) for u_h(T, x_Q).

    Pointwise ratios of single draws scatter widely; the mean over draws is
    what is held to ORDER_BOUNDS.
    """
    spec = WaveSpec() if horizon is None else WaveSpec(horizon=horizon)
    (a1, b1), (a2, b2) = spec.domain
    rng = make_rng(seed)
    y = np.column_stack([rng.uniform(a1, b1, draws), rng.uniform(a2, b2, draws)])
    exact = wave_exact(spec.horizon, spec.probe, (y[:, 0], y[:, 1]))
    e_coarse = np.abs(wave_solve_fd(y, 2 * h, spec) - exact)
    e_fine = np.abs(wave_solve_fd(y, h, spec) - exact)
    orders = [observed_order(c, f) for c, f in zip(e_coarse, e_fine)]
    order = float(np.mean(orders))
    lo, hi = ORDER_BOUNDS
    return CheckResult(
        "wave_order", lo <= order <= hi,
        {"order": order, "h": h, "horizon": spec.horizon,
         "orders": {"min": float(np.min(orders)), "max": float(np.max(orders))}},
    )


def check_ode_residual(points: int = 1000, seed: int = 3, step: float = 1e-6, tol: float = 1e-6) -> CheckResult:
    spec = OdeSpec()
    rng = make_rng(seed)
    t = rng.uniform(0.0, spec.horizon, points)
    y = rng.uniform(*spec.domain, points)
    u_t = (ode_exact(t + step, y) - ode_exact(t - step, y)) / (2.0 * step)
    residual = u_t + spec.decay * ode_exact(t, y) - ode_forcing(t, y, spec)
    worst = float(np.max(np.abs(residual)))
    return CheckResult("ode_residual", worst <= tol, {"max_residual": worst})


def second_difference(fn: Callable[[float], np.ndarray], step: float) -> np.ndarray:
    """Fourth-order central second derivative at offset 0 of ``fn(offset)``."""
    return (
        -fn(2 * step) + 16 * fn(step) - 30 * fn(0.0) + 16 * fn(-step) - fn(-2 * step)
    ) / (12.0 * step * step)


def check_wave_residual(points: int = 500, seed: int = 4, step: float = 1e-3, tol: float = 1e-5) -> CheckResult:
    spec = WaveSpec()
    (a1, b1), (a2, b2) = spec.domain
    rng = make_rng(seed)
    t = rng.uniform(0.0, spec.horizon, points)
    x1, x2 = rng.uniform(-1.0, 1.0, points), rng.uniform(-1.0, 1.0, points)
    y = (rng.uniform(a1, b1, points), rng.uniform(a2, b2, points))
    u_tt = second_difference(lambda s: wave_exact(t + s, (x1, x2), y), step)
    u_11 = second_difference(lambda s: wave_exact(t, (x1 + s, x2), y), step)
    u_22 = second_difference(lambda s: wave_exact(t, (x1, x2 + s), y), step)
    residual = u_tt - (u_11 + u_22) - wave_forcing(t, (x1, x2), y)
    worst = float(np.max(np.abs(residual)))
    return CheckResult("wave_residual", worst <= tol, {"max_residual": worst})


def check_quantile() -> CheckResult:
    z = np.linspace(-6.0, 6.0, 241)
    roundtrip = float(np.max(np.abs(inv_normal_cdf(normal_cdf(z)) - z)))
    known = {0.5: 0.0, 0.975: 1.959963984540054, 0.995: 2.5758293035489004}
    worst_known = max(abs(inv_normal_cdf(p) - q) for p, q in known.items())
    return CheckResult(
        "quantile", roundtrip <= 1e-8 and worst_known <= 1e-9,
        {"roundtrip_error": roundtrip, "known_error": worst_known},
    )


def check_ledger() -> CheckResult:
    ledger = build_ledger(
        LedgerCounts(m=241, m1=61, m2=180, n=135_000),
        UnitCosts(w_lf=4.36e-5, w_hf=2.24e-4, w_t1=10.98, w_p1=3.57e-5, w_t2=147.44, w_p2=3.55e-5),
    )
    terms = (ledger.lf_solves, ledger.hf_solves, ledger.train_nn1,
             ledger.predict_nn1, ledger.train_nn2, ledger.predict_nn2)
    identity = ledger.mfnnmc_total == sum(terms)
    ok = identity and abs(ledger.mfnnmc_total - 163.2) < 0.1 and abs(ledger.hfmc_total - 30.24) < 0.01
    return CheckResult(
        "ledger", ok, {"mfnnmc_total": ledger.mfnnmc_total, "hfmc_total": ledger.hfmc_total}
    )


def check_budget() -> CheckResult:
    budget = ToleranceBudget(tol=0.01, theta=0.5, alpha=0.01, error_mode=ErrorMode.ABSOLUTE)
    n = select_n_samples(budget, 1.0)
    bound = statistical_error_bound(budget, 1.0, n)
    ok = n == 265_396 and bound <= budget.theta * budget.tol
    return CheckResult("budget", ok, {"N": n, "bound": bound})


SUITE: dict[str, Callable[[], CheckResult]] = {
    "gradient": check_gradients,
    "ode_order": check_ode_order,
    "wave_order": check_wave_order,
    "ode_residual": check_ode_residual,
    "wave_residual": check_wave_residual,
    "quantile": check_quantile,
    "ledger": check_ledger,
    "budget": check_budget,
}


def run_validation(names: list[str] | None = None) -> list[CheckResult]:
    """Run the named checks (all by default) and log each outcome."""
    results = []
    for name in names or list(SUITE):
        start = time.perf_counter()
        result = SUITE[name]()
        result.seconds = time.perf_counter() - start
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, "%-14s %s %s (%.2fs)", name, "ok" if result.passed else "FAILED",
                   result.detail, result.seconds)
        results.append(result)
    return results
