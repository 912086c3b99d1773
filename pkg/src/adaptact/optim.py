"""SGD and Adam over flat lists of float64 arrays.

Both work on whatever :func:`adaptact.network.parameters` returns, so
weights, biases and activation parameters share one learning rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ShapeError


def _check(params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
    if len(params) != len(grads):
        raise ShapeError(f"{len(params)} parameter arrays but {len(grads)} gradients")
    for p, g in zip(params, grads):
        if np.shape(p) != np.shape(g):
            raise ShapeError(f"parameter shape {np.shape(p)} vs gradient {np.shape(g)}")


def sgd_step(params, grads, lr: float) -> list[np.ndarray]:
    if not lr > 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    _check(params, grads)
    return [np.asarray(p, dtype=np.float64) - lr * np.asarray(g) for p, g in zip(params, grads)]


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_step(state: AdamState, params, grads) -> tuple[AdamState, list[np.ndarray]]:
    """One bias-corrected Adam update. Returns a new state; inputs are untouched."""
    _check(params, grads)
    m = state.m or [np.zeros(np.shape(p)) for p in params]
    v = state.v or [np.zeros(np.shape(p)) for p in params]
    if len(m) != len(params):
        raise ShapeError("optimizer state does not match the parameter list")
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    new_m, new_v, new_p = [], [], []
    for p, g, mi, vi in zip(params, grads, m, v):
        g = np.asarray(g, dtype=np.float64)
        mi = b1 * mi + (1.0 - b1) * g
        vi = b2 * vi + (1.0 - b2) * g * g
        step = state.lr * (mi / c1) / (np.sqrt(vi / c2) + state.eps)
        new_m.append(mi)
        new_v.append(vi)
        new_p.append(np.asarray(p, dtype=np.float64) - step)
    new_state = AdamState(state.lr, b1, b2, state.eps, t, new_m, new_v)
    return new_state, new_p
