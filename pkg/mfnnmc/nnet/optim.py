"""Adam optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError
from .network import NetworkParams

DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators and step counter.

    Attributes:
        m: First-moment accumulator, shaped like the parameters
        v: Second-moment accumulator (entrywise >= 0)
        t: Number of steps taken
    """

    m: NetworkParams
    v: NetworkParams
    t: int = 0

    @classmethod
    def fresh(cls, params: NetworkParams) -> "AdamState":
        zeros = params.zeros_like()
        return cls(m=zeros, v=zeros, t=0)


def adam_step(
    params: NetworkParams,
    state: AdamState,
    grads: NetworkParams,
    lr: float,
    beta1: float = DEFAULT_BETA1,
    beta2: float = DEFAULT_BETA2,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[NetworkParams, AdamState]:
    """One Adam update.

    m_t = β1 m + (1-β1) g,  v_t = β2 v + (1-β2) g²,
    p  <- p - lr · m̂_t / (√v̂_t + ε) with m̂_t = m_t/(1-β1^t), v̂_t = v_t/(1-β2^t).
    """
    if grads.arch != params.arch or state.m.arch != params.arch:
        raise InputError("Gradient/state shapes do not match parameters")

    t = state.t + 1
    m = state.m.map(lambda m_, g: beta1 * m_ + (1.0 - beta1) * g, grads)
    v = state.v.map(lambda v_, g: beta2 * v_ + (1.0 - beta2) * g * g, grads)
    if lr == 0.0:
        return params, AdamState(m=m, v=v, t=t)

    correction1 = 1.0 - beta1 ** t
    correction2 = 1.0 - beta2 ** t
    new_params = params.map(
        lambda p, m_, v_: p - lr * (m_ / correction1) / (np.sqrt(v_ / correction2) + epsilon),
        m,
        v,
    )
    return new_params, AdamState(m=m, v=v, t=t)
