"""Independent reference computations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def brute_force_svm_dual(K: np.ndarray, y: np.ndarray, C: float) -> tuple[float, np.ndarray]:
    """Exact soft-margin dual optimum by enumerating active sets.

    Every alpha is fixed at 0, fixed at C, or free.  For each assignment the
    free variables solve the stationarity system of the equality-constrained
    QP; feasible solutions are candidates and the best one is the global
    maximum of the concave dual.  Exponential in n, fine for n <= 8.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    best = -math.inf
    best_alpha = None
    for states in itertools.product((0, 1, 2), repeat=n):
        states = np.array(states)
        alpha = np.where(states == 1, C, 0.0).astype(float)
        free = np.flatnonzero(states == 2)
        if len(free):
            fixed = np.flatnonzero(states != 2)
            # [Q_FF  -y_F] [a_F]   [1 - Q_Fx a_x]
            # [y_F'   0  ] [ b ] = [  -y_x' a_x ]
            k = len(free)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = Q[np.ix_(free, free)]
            A[:k, k] = -y[free]
            A[k, :k] = y[free]
            rhs = np.empty(k + 1)
            rhs[:k] = 1.0 - Q[np.ix_(free, fixed)] @ alpha[fixed]
            rhs[k] = -y[fixed] @ alpha[fixed]
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.linalg.norm(A @ sol - rhs) > 1e-9:
                continue
            a_free = sol[:k]
            if np.any(a_free < -1e-12) or np.any(a_free > C + 1e-12):
                continue
            alpha[free] = np.clip(a_free, 0.0, C)
        if abs(y @ alpha) > 1e-9:
            continue
        ay = alpha * y
        obj = alpha.sum() - 0.5 * ay @ K @ ay
        if obj > best:
            best, best_alpha = obj, alpha.copy()
    return best, best_alpha


def direct_decision(support_points, dual_weights, bias, kernel_fn, x) -> float:
    """Plain-Python summation of the decision function."""
    total = 0.0
    for s, w in zip(support_points, dual_weights):
        total += w * kernel_fn(s, x)
    return total + bias


def lfsr_cycle(state: int, degree: int, taps) -> tuple[int, int]:
    """Walk the Fibonacci LFSR state cycle from ``state``; return (period, ones)."""
    mask = (1 << degree) - 1
    start = state
    period = 0
    ones = 0
    while True:
        ones += (state >> (degree - 1)) & 1
        fb = 0
        for t in taps:
            fb ^= (state >> (t - 1)) & 1
        state = ((state << 1) | fb) & mask
        period += 1
        if state == start:
            return period, ones
