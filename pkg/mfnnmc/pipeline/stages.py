"""Steps 2-6 of the MFNNMC algorithm.

STAGES:
- evaluate_fidelity_data: Q_LF on Y_I ∪ Y_II, Q_HF on Y_I
- train_nn1: learn (y, Q_LF) -> Q_HF on Y_I
- augment_hf: Q̂_HF = Q_HF on Y_I, NN1 prediction on Y_II
- train_nn2: learn y -> Q̂_HF on all M points

Both networks see the parameter y mapped onto the unit cube. NN1 also sees
Q_LF mapped onto [0, 1] by its min/max over Y_I.

Point evaluations run in index-ordered blocks, optionally spread over a
thread pool. Every value depends only on its own point, so results do not
depend on the number of threads.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Union

import numpy as np

from ..design import SampleDesign, ScalingTransform
from ..exceptions import InputError, MfnnmcError, SolverError
from ..host.time import PhaseTimer
from ..models.catalog import BiFidelitySpec
from ..nnet.network import Architecture, NetworkParams, forward_batch
from ..nnet.training import TrainingConfig, TrainingHistory, train
from .types import AugmentedDataset, Provenance

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 100_000
SOLVER_BLOCK_SIZE = 4096

PointFn = Callable[[np.ndarray], np.ndarray]
Nn1Oracle = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _locate_failure(fn: PointFn, points: np.ndarray) -> Optional[np.ndarray]:
    for point in points:
        try:
            value = np.asarray(fn(point.reshape(1, -1)), dtype=np.float64)
        except Exception:
            return point
        if not np.all(np.isfinite(value)):
            return point
    return None


def _evaluate_block(fn: PointFn, points: np.ndarray, label: str) -> np.ndarray:
    try:
        values = np.asarray(fn(points), dtype=np.float64).reshape(-1)
    except MfnnmcError:
        raise
    except Exception as e:
        bad = _locate_failure(fn, points)
        y = (bad if bad is not None else points[0]).tolist()
        raise SolverError(f"{label} failed: {e}", y=y) from e
    if values.shape[0] != points.shape[0]:
        raise SolverError(
            f"{label} returned {values.shape[0]} values for {points.shape[0]} points",
            y=points[0].tolist(),
        )
    bad_idx = np.nonzero(~np.isfinite(values))[0]
    if bad_idx.size:
        raise SolverError(f"{label} produced a non-finite value", y=points[bad_idx[0]].tolist())
    return values


def evaluate_points(
    fn: PointFn,
    points: np.ndarray,
    threads: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    label: str = "solve",
) -> np.ndarray:
    """Apply ``fn`` to (n, d) points block-wise, returning (n,) values in point order.

    Raises:
        SolverError: If ``fn`` raises (with the offending point attached) or
            returns non-finite values
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = pts.shape[0]
    if n == 0:
        return np.empty(0)
    threads = max(1, int(threads))
    # block boundaries must not depend on the thread count
    step = max(1, int(block_size))
    slices = [slice(start, min(start + step, n)) for start in range(0, n, step)]
    if threads == 1 or len(slices) == 1:
        parts = [_evaluate_block(fn, pts[s], label) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: _evaluate_block(fn, pts[s], label), slices))
    return np.concatenate(parts)


def evaluate_fidelity_data(
    design: SampleDesign,
    spec: BiFidelitySpec,
    threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Q_LF at all M design points and Q_HF at the M_1 points of Y_I."""
    timer = timer or PhaseTimer()
    model = spec.model
    if model.dim != design.dim:
        raise InputError(
            "Design dimension does not match the model",
            {"design": design.dim, "model": model.dim},
        )
    with timer.phase("lf_solves"):
        lf_all = evaluate_points(
            spec.q_lf, design.points, threads, SOLVER_BLOCK_SIZE, label="low-fidelity solve"
        )
    with timer.phase("hf_solves"):
        hf_on_I = evaluate_points(
            spec.q_hf, design.y_I, threads, SOLVER_BLOCK_SIZE, label="high-fidelity solve"
        )
    logger.info(
        "fidelity data: %d LF solves (h=%g), %d HF solves (h=%g)",
        design.m, spec.h_lf, design.m1, spec.h_hf,
    )
    return lf_all, hf_on_I


def _check_lengths(design: SampleDesign, lf_all: np.ndarray, hf_on_I: np.ndarray) -> None:
    if lf_all.shape[0] != design.m or hf_on_I.shape[0] != design.m1:
        raise InputError(
            "Fidelity data does not match the design",
            {"M": design.m, "M1": design.m1, "lf": lf_all.shape[0], "hf": hf_on_I.shape[0]},
        )


def lf_scaling_for(design: SampleDesign, lf_all: np.ndarray) -> ScalingTransform:
    """Min/max scaling of Q_LF over Y_I."""
    return ScalingTransform.from_values(np.asarray(lf_all)[design.in_first])


def nn1_features(
    points: np.ndarray,
    lf_values: np.ndarray,
    scaling: ScalingTransform,
    lf_scaling: ScalingTransform,
) -> np.ndarray:
    """NN1 inputs: scaled y followed by scaled Q_LF, shape (n, d + 1)."""
    lf = lf_scaling.apply(np.asarray(lf_values, dtype=np.float64).reshape(-1, 1))
    return np.column_stack([scaling.apply(points), lf[:, 0]])


def train_nn1(
    design: SampleDesign,
    lf_all: np.ndarray,
    hf_on_I: np.ndarray,
    arch: Architecture,
    cfg: TrainingConfig,
    seed: int,
) -> tuple[NetworkParams, TrainingHistory]:
    """Fit NN1 on the M_1 pairs ((y, Q_LF(y)), Q_HF(y)), y ∈ Y_I.

    Raises:
        InputError: If the data does not match the design or the architecture
            does not take d + 1 inputs
        TrainingDivergenceError: On a non-finite loss
    """
    lf_all = np.asarray(lf_all, dtype=np.float64)
    hf_on_I = np.asarray(hf_on_I, dtype=np.float64)
    _check_lengths(design, lf_all, hf_on_I)
    if arch.input_width != design.dim + 1 or arch.output_width != 1:
        raise InputError(
            "NN1 architecture must take d + 1 inputs and give one output",
            {"dim": design.dim, "arch": arch.to_dict()},
        )
    scaling = ScalingTransform.from_domain(design.domain)
    x = nn1_features(design.y_I, lf_all[design.in_first], scaling, lf_scaling_for(design, lf_all))
    params, history = train(arch, (x, hf_on_I.reshape(-1, 1)), cfg, seed)
    logger.info("NN1 trained on %d pairs: final loss %.3e", design.m1, history.final_train_loss)
    return params, history


def augment_hf(
    nn1: Union[NetworkParams, Nn1Oracle, None],
    design: SampleDesign,
    lf_all: np.ndarray,
    hf_on_I: np.ndarray,
    threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> AugmentedDataset:
    """Q̂_HF: solver values on Y_I, NN1 predictions on Y_II.

    ``nn1`` may also be a plain callable ``(points, lf_values) -> values``,
    or None when Y_II is empty.
    """
    timer = timer or PhaseTimer()
    lf_all = np.asarray(lf_all, dtype=np.float64)
    hf_on_I = np.asarray(hf_on_I, dtype=np.float64)
    _check_lengths(design, lf_all, hf_on_I)
    second = ~design.in_first
    values = np.empty(design.m)
    values[design.in_first] = hf_on_I

    with timer.phase("predict_nn1"):
        if design.m2 == 0:
            predicted = np.empty(0)
        elif nn1 is None:
            raise InputError("NN1 is required when Y_II is not empty", {"M2": design.m2})
        elif isinstance(nn1, NetworkParams):
            features = nn1_features(
                design.y_II,
                lf_all[second],
                ScalingTransform.from_domain(design.domain),
                lf_scaling_for(design, lf_all),
            )
            predicted = evaluate_points(
                lambda f: forward_batch(nn1, f)[:, 0], features, threads, label="NN1 prediction"
            )
        else:
            predicted = np.asarray(nn1(design.y_II, lf_all[second]), dtype=np.float64).reshape(-1)
    values[second] = predicted

    provenance = np.where(design.in_first, Provenance.SOLVER.value, Provenance.NN1.value)
    return AugmentedDataset(
        points=design.points.copy(),
        values=values,
        provenance=provenance,
        domain=design.domain,
    )


def train_nn2(
    augmented: AugmentedDataset,
    arch: Architecture,
    cfg: TrainingConfig,
    seed: int,
) -> tuple[NetworkParams, TrainingHistory]:
    """Fit NN2 on the M pairs (y, Q̂_HF(y))."""
    dim = augmented.points.shape[1]
    if arch.input_width != dim or arch.output_width != 1:
        raise InputError(
            "NN2 architecture must take d inputs and give one output",
            {"dim": dim, "arch": arch.to_dict()},
        )
    x = ScalingTransform.from_domain(augmented.domain).apply(augmented.points)
    params, history = train(arch, (x, augmented.values.reshape(-1, 1)), cfg, seed)
    logger.info("NN2 trained on %d pairs: final loss %.3e", augmented.m, history.final_train_loss)
    return params, history


def surrogate_predict(
    nn2: NetworkParams,
    scaling: ScalingTransform,
    points: np.ndarray,
    threads: int = 1,
) -> np.ndarray:
    """Q_MFNN at (n, d) points."""
    return evaluate_points(
        lambda p: forward_batch(nn2, scaling.apply(p))[:, 0],
        points,
        threads,
        label="NN2 prediction",
    )
