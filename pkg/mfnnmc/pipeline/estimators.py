"""Monte Carlo estimators: MFNNMC (surrogate) and HFMC (solver) sample means.

Sums use a fixed index-ordered pairwise reduction over blocks, so the
estimate is bit-identical for any thread count.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional, Union

import numpy as np

from ..analysis.cost import LedgerCounts, UnitCosts, build_ledger, per_unit
from ..design import ScalingTransform
from ..exceptions import InputError
from ..host.time import PhaseTimer
from ..models.catalog import BiFidelitySpec
from ..nnet.network import NetworkParams, forward_batch
from .stages import SOLVER_BLOCK_SIZE, evaluate_points
from .types import EstimatorResult, Method

logger = logging.getLogger(__name__)

SUM_BLOCK = 1024


def pairwise_sum(values: np.ndarray) -> float:
    """Sum of a 1D array by a pairwise tree over fixed 1024-element blocks."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        return 0.0
    partial = [float(np.sum(v[i:i + SUM_BLOCK])) for i in range(0, v.size, SUM_BLOCK)]
    while len(partial) > 1:
        paired = [partial[i] + partial[i + 1] for i in range(0, len(partial) - 1, 2)]
        if len(partial) % 2:
            paired.append(partial[-1])
        partial = paired
    return partial[0]


def sample_mean_variance(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and unbiased sample variance (two-pass).

    Raises:
        InputError: With fewer than two values
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size < 2:
        raise InputError("Need at least two samples", {"N": int(v.size)})
    mean = pairwise_sum(v) / v.size
    dev = v - mean
    return mean, max(pairwise_sum(dev * dev) / (v.size - 1), 0.0)


def _moment(values: np.ndarray, moment: int) -> np.ndarray:
    if moment < 1:
        raise InputError("Moment order must be >= 1", {"moment": moment})
    return values if moment == 1 else values ** moment


def estimate_mfnnmc(
    nn2: Union[NetworkParams, Callable[[np.ndarray], np.ndarray]],
    scaling: ScalingTransform,
    samples: np.ndarray,
    moment: int = 1,
    reference: Optional[float] = None,
    threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> EstimatorResult:
    """Sample mean of Q_MFNN^k over the N samples.

    ``nn2`` may be a plain callable on unscaled points (e.g. an exact-QoI
    oracle); ``scaling`` is then ignored.
    """
    timer = timer or PhaseTimer()
    samples = np.asarray(samples, dtype=np.float64)
    if isinstance(nn2, NetworkParams):
        fn = lambda p: forward_batch(nn2, scaling.apply(p))[:, 0]  # noqa: E731
    else:
        fn = nn2
    before = timer.get("predict_nn2")
    with timer.phase("predict_nn2"):
        values = evaluate_points(fn, samples, threads, label="NN2 prediction")
    seconds = timer.get("predict_nn2") - before
    mean, var = sample_mean_variance(_moment(values, moment))
    n = values.shape[0]
    ledger = build_ledger(LedgerCounts(n=n), UnitCosts(w_p2=per_unit(seconds, n)))
    logger.info("MFNNMC estimate %.10g (N=%d, variance %.3e)", mean, n, var)
    return EstimatorResult(
        estimate=mean,
        sample_variance=var,
        n_samples=n,
        method=Method.MFNNMC,
        reference=reference,
        cost=ledger,
        moment=moment,
    )


def estimate_hfmc(
    spec: Union[BiFidelitySpec, Callable[[np.ndarray], np.ndarray]],
    samples: np.ndarray,
    moment: int = 1,
    reference: Optional[float] = None,
    threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> EstimatorResult:
    """Sample mean of Q_HF^k over N solver calls.

    ``spec`` may be a plain callable on points (e.g. the exact QoI).
    """
    timer = timer or PhaseTimer()
    samples = np.asarray(samples, dtype=np.float64)
    fn = spec.q_hf if isinstance(spec, BiFidelitySpec) else spec
    before = timer.get("hf_solves")
    with timer.phase("hf_solves"):
        values = evaluate_points(fn, samples, threads, SOLVER_BLOCK_SIZE, label="high-fidelity solve")
    seconds = timer.get("hf_solves") - before
    mean, var = sample_mean_variance(_moment(values, moment))
    n = values.shape[0]
    ledger = build_ledger(LedgerCounts(n=n), UnitCosts(w_hf=per_unit(seconds, n)))
    logger.info("HFMC estimate %.10g (N=%d, variance %.3e)", mean, n, var)
    return EstimatorResult(
        estimate=mean,
        sample_variance=var,
        n_samples=n,
        method=Method.HFMC,
        reference=reference,
        cost=ledger,
        moment=moment,
    )
