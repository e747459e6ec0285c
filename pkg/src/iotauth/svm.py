"""SVM quantization of channel measurements.

The gateway splits its own measurements into two partitions, trains a
soft-margin kernel SVM on that labelling, and turns every measurement into
one bit: the sign of the decision value.  Measurements whose decision value
falls inside the guard band ``|f(x)| < guard_epsilon`` are dropped because
they are the ones most likely to land on opposite sides of the boundary at
the two ends of the link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import FeatureVector, stack
from .errors import DegenerateInput, InsufficientBits, NoConvergence

TAU = 1e-12
DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"kernel kind must be 'linear' or 'rbf', got {self.kind!r}")
        if self.kind == "rbf" and (self.gamma is None or not self.gamma > 0):
            raise ValueError("rbf kernel needs gamma > 0")

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        if self.kind == "linear":
            return a @ b.T
        sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
        return np.exp(-self.gamma * np.maximum(sq, 0.0))

    def __call__(self, x: np.ndarray, z: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.kind == "linear":
            return float(x @ z)
        d = x - z
        return math.exp(-self.gamma * float(d @ d))


def default_kernel(dims: int) -> KernelSpec:
    return KernelSpec("rbf", gamma=1.0 / dims)


@dataclass(frozen=True)
class Boundary:
    """Trained decision surface ``f(x) = sum_i w_i K(s_i, x) + bias``.

    ``support_points`` holds one row per support vector in the coordinates
    given by ``features``; ``dual_weights`` are the signed ``alpha_i * y_i``.
    """

    support_points: np.ndarray
    dual_weights: np.ndarray
    bias: float
    kernel: KernelSpec
    features: tuple[str, ...] = ("gains",)

    def __post_init__(self):
        if len(self.support_points) < 1 or len(self.support_points) != len(self.dual_weights):
            raise ValueError("boundary needs matching, non-empty support points and weights")

    @property
    def dims(self) -> int:
        return self.support_points.shape[1]

    @property
    def n_support(self) -> int:
        return len(self.dual_weights)

    def size_bits(self) -> int:
        """Over-the-air size: float64 coordinates, weights, bias and gamma, plus a kind byte."""
        n, d = self.support_points.shape
        return 64 * (n * d + n + 1) + 8 + 64

    def to_dict(self) -> dict:
        return {
            "kernel": {"kind": self.kernel.kind, "gamma": self.kernel.gamma},
            "features": list(self.features),
            "bias": self.bias,
            "dual_weights": self.dual_weights.tolist(),
            "support_points": self.support_points.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Boundary":
        return cls(
            support_points=np.asarray(d["support_points"], dtype=float),
            dual_weights=np.asarray(d["dual_weights"], dtype=float),
            bias=float(d["bias"]),
            kernel=KernelSpec(d["kernel"]["kind"], d["kernel"]["gamma"]),
            features=tuple(d["features"]),
        )


@dataclass(frozen=True)
class QuantizerConfig:
    guard_epsilon: float = 0.5
    soft_margin_C: float = 10.0
    target_bits: int = 128

    def __post_init__(self):
        if not self.guard_epsilon >= 0:
            raise ValueError("guard_epsilon must be >= 0")
        if not self.soft_margin_C > 0:
            raise ValueError("soft_margin_C must be > 0")
        if self.target_bits < 1:
            raise ValueError("target_bits must be >= 1")


@dataclass(frozen=True)
class QuantizedBits:
    bits: str
    kept_indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != len(self.kept_indices):
            raise ValueError("bits and kept_indices must have equal length")
        if any(b >= a for a, b in zip(self.kept_indices[1:], self.kept_indices)):
            raise ValueError("kept_indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.bits)

    def truncate(self, n: int) -> "QuantizedBits":
        return QuantizedBits(self.bits[:n], self.kept_indices[:n])


@dataclass
class DualSolution:
    alpha: np.ndarray
    bias: float
    objective: float
    iterations: int
    violation: float
    duality_gap: float
    decision: np.ndarray = field(repr=False)


def _as_matrix(points, features: Sequence[str]) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return np.atleast_2d(points.astype(float))
    points = list(points)
    if points and isinstance(points[0], FeatureVector):
        return stack(points, features)
    return np.atleast_2d(np.asarray(points, dtype=float))


def label_two_partitions(points, features: Sequence[str] = ("gains",), max_iter: int = 100) -> np.ndarray:
    """Two-means labelling of ``points`` into {-1, +1}.

    Centroids start at the point with the smallest first coordinate and the
    point farthest from it.  The cluster whose mean first coordinate is larger
    gets label +1; exact ties fall back to lexicographic comparison of the
    full centroid.
    """
    x = _as_matrix(points, features)
    if len(x) < 2:
        raise DegenerateInput("need at least two points to partition")
    if np.all(x == x[0]):
        raise DegenerateInput("all points are identical")
    c0 = x[int(np.argmin(x[:, 0]))]
    c1 = x[int(np.argmax(((x - c0) ** 2).sum(1)))]
    centroids = np.vstack([c0, c1])
    assign = None
    for _ in range(max_iter):
        d = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(2)
        new = (d[:, 1] < d[:, 0]).astype(int)
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        for k in (0, 1):
            if np.any(assign == k):
                centroids[k] = x[assign == k].mean(0)
    m0, m1 = centroids
    upper = 1 if tuple(m1) > tuple(m0) else 0
    return np.where(assign == upper, 1, -1)


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def solve_dual(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DualSolution:
    """Sequential minimal optimization of the soft-margin SVM dual.

    Maximizes ``sum(alpha) - 0.5 * (alpha*y) K (alpha*y)`` subject to
    ``0 <= alpha <= C`` and ``sum(alpha*y) = 0``.  Each iteration picks the
    maximal-violating index ``i`` and a second index ``j`` by second-order
    gain, then solves the two-variable subproblem in closed form.  Stops when
    the maximal KKT violation ``m - M`` drops below ``tol``.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - e'a

    it = 0
    violation = math.inf
    while True:
        pos = y > 0
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        score = -y * grad
        i = int(np.argmax(np.where(up, score, -np.inf)))
        m_up = score[i]
        m_low = np.min(np.where(low, score, np.inf))
        violation = float(m_up - m_low)
        if violation < tol:
            break
        if it >= max_iter:
            sol = _finish(alpha, y, K, grad, C, it, violation)
            raise NoConvergence(it, violation, sol.duality_gap)

        b = m_up - score
        cand = low & (b > 0)
        a = np.maximum(diag[i] + diag - 2.0 * K[i], TAU)
        j = int(np.argmax(np.where(cand, b * b / a, -np.inf)))

        t = (score[i] - score[j]) / a[j]
        t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
        di, dj = y[i] * t, -y[j] * t
        alpha[i] = min(max(alpha[i] + di, 0.0), C)
        alpha[j] = min(max(alpha[j] + dj, 0.0), C)
        grad += Q[:, i] * di + Q[:, j] * dj
        it += 1

    return _finish(alpha, y, K, grad, C, it, violation)


def _finish(alpha, y, K, grad, C, it, violation) -> DualSolution:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        rho = float(yg[free].mean())
    else:
        pos = y > 0
        # Feasible interval for rho from bound variables.
        ub_mask = (pos & (alpha == 0)) | (~pos & (alpha == C))
        lb_mask = (pos & (alpha == C)) | (~pos & (alpha == 0))
        ub = yg[ub_mask].min() if np.any(ub_mask) else math.inf
        lb = yg[lb_mask].max() if np.any(lb_mask) else -math.inf
        if math.isinf(ub) or math.isinf(lb):
            rho = float(lb if math.isinf(ub) else ub)
        else:
            rho = 0.5 * float(ub + lb)
    bias = -rho
    decision = K @ (alpha * y) + bias
    dual = dual_objective(alpha, y, K)
    ay = alpha * y
    primal = 0.5 * float(ay @ K @ ay) + C * float(np.maximum(0.0, 1.0 - y * decision).sum())
    return DualSolution(
        alpha=alpha,
        bias=bias,
        objective=dual,
        iterations=it,
        violation=violation,
        duality_gap=primal - dual,
        decision=decision,
    )


def kkt_residuals(alpha: np.ndarray, y: np.ndarray, decision: np.ndarray, C: float) -> np.ndarray:
    """Per-point violation of the soft-margin KKT conditions (0 when satisfied)."""
    margin = np.asarray(y) * np.asarray(decision)
    res = np.zeros(len(alpha))
    at_zero = alpha <= 0
    at_c = alpha >= C
    free = ~at_zero & ~at_c
    res[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    res[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    res[free] = np.abs(margin[free] - 1.0)
    return res


def train_boundary(
    points,
    labels,
    kernel: KernelSpec | None = None,
    C: float = 10.0,
    *,
    features: Sequence[str] = ("gains",),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Boundary:
    x = _as_matrix(points, features)
    y = np.asarray(labels, dtype=float)
    if len(y) != len(x):
        raise ValueError("points and labels differ in length")
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be -1 or +1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise DegenerateInput("both classes must be present")
    if kernel is None:
        kernel = default_kernel(x.shape[1])
    sol = solve_dual(kernel.matrix(x, x), y, C, tol=tol, max_iter=max_iter)
    sv = sol.alpha > 0
    return Boundary(
        support_points=x[sv].copy(),
        dual_weights=(sol.alpha * y)[sv],
        bias=sol.bias,
        kernel=kernel,
        features=tuple(features),
    )


def decision_values(boundary: Boundary, points) -> np.ndarray:
    x = _as_matrix(points, boundary.features)
    if x.shape[1] != boundary.dims:
        raise ValueError(f"expected {boundary.dims}-dimensional points, got {x.shape[1]}")
    return boundary.kernel.matrix(x, boundary.support_points) @ boundary.dual_weights + boundary.bias


def decision_value(boundary: Boundary, x) -> float:
    if isinstance(x, FeatureVector):
        x = x.as_array(boundary.features)
    return float(decision_values(boundary, np.atleast_2d(x))[0])


def quantize(probes, boundary: Boundary, config: QuantizerConfig) -> QuantizedBits:
    """Bit ``i`` is 1 iff ``f(probe_i) > 0``; guard-band rounds are dropped.

    Raises :class:`InsufficientBits` when fewer than ``config.target_bits``
    rounds survive; the caller should probe more rounds.
    """
    f = decision_values(boundary, probes)
    if len(f) == 0:
        raise ValueError("no probes to quantize")
    keep = np.abs(f) >= config.guard_epsilon
    idx = np.flatnonzero(keep)
    if len(idx) < config.target_bits:
        raise InsufficientBits(len(idx), config.target_bits)
    bits = "".join("1" if v > 0 else "0" for v in f[idx])
    return QuantizedBits(bits, tuple(int(i) for i in idx))


def bits_at(probes, boundary: Boundary, indices: Sequence[int]) -> str:
    """Signs of ``f`` at the given rounds, with no guard band applied."""
    probes = list(probes)
    if not indices:
        return ""
    f = decision_values(boundary, [probes[i] for i in indices])
    return "".join("1" if v > 0 else "0" for v in f)


def rss_baseline_quantize(probes: Sequence[FeatureVector], threshold: float) -> QuantizedBits:
    """RSS thresholding: bit 1 iff rssi > threshold, every round kept."""
    probes = list(probes)
    if not probes:
        raise ValueError("no probes to quantize")
    bits = "".join("1" if p.rssi > threshold else "0" for p in probes)
    return QuantizedBits(bits, tuple(range(len(probes))))


def disagreement(a: str, b: str) -> float:
    if len(a) != len(b):
        raise ValueError("bit strings differ in length")
    if not a:
        return 0.0
    return sum(x != y for x, y in zip(a, b)) / len(a)
