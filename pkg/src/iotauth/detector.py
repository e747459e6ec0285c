"""Online per-feature anomaly detection feeding the trust engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .channel import FeatureVector

DEFAULT_FEATURES = ("rssi", "cfo")


@dataclass(frozen=True)
class FeatureProfile:
    """Welford accumulators, one (count, mean, M2) triple per feature."""

    features: tuple[str, ...] = DEFAULT_FEATURES
    count: tuple[int, ...] = (0, 0)
    mean: tuple[float, ...] = (0.0, 0.0)
    m2: tuple[float, ...] = (0.0, 0.0)
    warmup_n: int = 30

    @classmethod
    def empty(cls, features=DEFAULT_FEATURES, warmup_n: int = 30) -> "FeatureProfile":
        n = len(features)
        return cls(tuple(features), (0,) * n, (0.0,) * n, (0.0,) * n, warmup_n)

    def variance(self, i: int) -> float:
        """Unbiased sample variance of the accepted samples of feature ``i``."""
        n = self.count[i]
        return self.m2[i] / (n - 1) if n > 1 else 0.0


@dataclass(frozen=True)
class Verdict:
    flags: dict[str, bool]
    z_scores: dict[str, float]

    @property
    def any_flag(self) -> bool:
        return any(self.flags.values())


def _value(sample, name: str) -> float:
    if isinstance(sample, FeatureVector):
        return float(getattr(sample, name))
    return float(sample[name])


def observe(
    profile: FeatureProfile,
    sample: FeatureVector | Mapping[str, float],
    k_sigma: float = 3.0,
) -> tuple[Verdict, FeatureProfile]:
    """Score ``sample`` against ``profile`` and return the updated profile.

    A feature is flagged when its z-score exceeds ``k_sigma`` and the feature
    has at least ``warmup_n`` accepted samples.  Flagged values are kept out
    of the profile so an adversary cannot drag it toward its own features.
    """
    if not k_sigma > 0:
        raise ValueError("k_sigma must be > 0")
    flags, zs = {}, {}
    count, mean, m2 = list(profile.count), list(profile.mean), list(profile.m2)
    for i, name in enumerate(profile.features):
        x = _value(sample, name)
        std = math.sqrt(profile.variance(i))
        diff = x - mean[i]
        if std > 0:
            z = diff / std
        else:
            z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
        flag = count[i] >= profile.warmup_n and abs(z) > k_sigma
        flags[name] = flag
        zs[name] = z
        if not flag:
            count[i] += 1
            delta = x - mean[i]
            mean[i] += delta / count[i]
            m2[i] += delta * (x - mean[i])
    new = replace(profile, count=tuple(count), mean=tuple(mean), m2=tuple(m2))
    return Verdict(flags, zs), new


def detect_injection(behavior: bool, p_detect: float, p_false: float, rng: np.random.Generator) -> bool:
    """Noisy detector of data-injection activity in the current step."""
    if not (0.0 <= p_detect <= 1.0 and 0.0 <= p_false <= 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    return bool(rng.random() < (p_detect if behavior else p_false))
