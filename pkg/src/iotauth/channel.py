"""Reciprocal channel probing between a sensor and its gateway.

Each feature component is modelled as ``obs = h + n``: ``h`` is a latent
realization shared by sensor and gateway and ``n`` is independent per-side
observation noise.  Working in units of the total per-component standard
deviation, ``var(h) = rho`` and ``var(n) = 1 - rho`` so the Pearson
correlation between the two sides is exactly ``rho``.  The eavesdropper sees
the same statistics on an independent latent.

Over a sequence of rounds the latent follows a stationary first-order
Gauss-Markov recursion ``h[t+1] = sqrt(1 - a**2) h[t] + a w[t]`` where ``a``
is ``drift_rate``: 0 freezes the channel, 1 gives independent rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

RSSI_MEAN_DBM = -60.0
RSSI_STD_DB = 4.0
CFO_MEAN_HZ = 0.0
CFO_STD_HZ = 200.0

FEATURE_GROUPS = ("rssi", "cfo", "gains")


@dataclass(frozen=True)
class FeatureVector:
    rssi: float
    cfo: float
    gains: tuple[float, ...]

    def __post_init__(self):
        if len(self.gains) < 1:
            raise ValueError("gains must have at least one component")
        values = (self.rssi, self.cfo, *self.gains)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("feature components must be finite")

    @property
    def dims(self) -> int:
        return len(self.gains)

    def as_array(self, features: Sequence[str] = ("gains",)) -> np.ndarray:
        """Concatenate the selected feature groups into a flat vector."""
        parts: list[float] = []
        for name in features:
            if name == "rssi":
                parts.append(self.rssi)
            elif name == "cfo":
                parts.append(self.cfo)
            elif name == "gains":
                parts.extend(self.gains)
            else:
                raise ValueError(f"unknown feature group {name!r}")
        return np.asarray(parts, dtype=float)


@dataclass(frozen=True)
class ReciprocityParams:
    """Channel statistics.

    ``sigma_n`` is derived: it is the per-side noise std in units of the
    component's total std, ``sqrt(1 - rho)``.  Use :meth:`from_noise` to
    specify the channel by its noise level instead.
    """

    rho: float
    dims: int = 2
    drift_rate: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.dims < 1:
            raise ValueError(f"dims must be >= 1, got {self.dims}")
        if not 0.0 <= self.drift_rate <= 1.0:
            raise ValueError(f"drift_rate must lie in [0, 1], got {self.drift_rate}")

    @classmethod
    def from_noise(cls, sigma_n: float, dims: int = 2, drift_rate: float = 1.0) -> "ReciprocityParams":
        if not 0.0 <= sigma_n <= 1.0:
            raise ValueError(f"sigma_n must lie in [0, 1] (normalized units), got {sigma_n}")
        return cls(rho=1.0 - sigma_n**2, dims=dims, drift_rate=drift_rate)

    @property
    def sigma_n(self) -> float:
        return math.sqrt(1.0 - self.rho)

    @property
    def n_components(self) -> int:
        return self.dims + 2


@dataclass(frozen=True)
class ProbeRound:
    sensor_obs: FeatureVector
    gateway_obs: FeatureVector
    eve_obs: FeatureVector
    round_index: int


def _to_vector(z: np.ndarray) -> FeatureVector:
    return FeatureVector(
        rssi=float(RSSI_MEAN_DBM + RSSI_STD_DB * z[0]),
        cfo=float(CFO_MEAN_HZ + CFO_STD_HZ * z[1]),
        gains=tuple(float(v) for v in z[2:]),
    )


class _ChannelState:
    """Latent state of a probing sequence; consumes ``rng`` in a fixed order."""

    def __init__(self, params: ReciprocityParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self.h_std = math.sqrt(params.rho)
        n = params.n_components
        self.latent = self.h_std * rng.standard_normal(n)
        self.latent_eve = self.h_std * rng.standard_normal(n)

    def advance(self) -> None:
        a = self.params.drift_rate
        keep = math.sqrt(1.0 - a * a)
        n = self.params.n_components
        self.latent = keep * self.latent + a * self.h_std * self.rng.standard_normal(n)
        self.latent_eve = keep * self.latent_eve + a * self.h_std * self.rng.standard_normal(n)

    def observe(self, index: int) -> ProbeRound:
        n = self.params.n_components
        sigma = self.params.sigma_n
        noise = sigma * self.rng.standard_normal((3, n))
        return ProbeRound(
            sensor_obs=_to_vector(self.latent + noise[0]),
            gateway_obs=_to_vector(self.latent + noise[1]),
            eve_obs=_to_vector(self.latent_eve + noise[2]),
            round_index=index,
        )


def probe(params: ReciprocityParams, rng: np.random.Generator) -> ProbeRound:
    """One probing round with a freshly drawn latent channel."""
    return _ChannelState(params, rng).observe(0)


def probe_sequence(params: ReciprocityParams, n_rounds: int, rng: np.random.Generator) -> list[ProbeRound]:
    """``n_rounds`` consecutive rounds with the latent evolving by ``drift_rate``."""
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
    state = _ChannelState(params, rng)
    rounds = [state.observe(0)]
    for i in range(1, n_rounds):
        state.advance()
        rounds.append(state.observe(i))
    return rounds


class ChannelProber:
    """Incremental version of :func:`probe_sequence` for callers that re-probe.

    Calling ``next_rounds(n)`` repeatedly yields the same rounds as a single
    ``probe_sequence`` of the total length.
    """

    def __init__(self, params: ReciprocityParams, rng: np.random.Generator):
        self.params = params
        self._state: _ChannelState | None = None
        self._rng = rng
        self.rounds_probed = 0

    def next_rounds(self, n: int) -> list[ProbeRound]:
        out = []
        for _ in range(n):
            if self._state is None:
                self._state = _ChannelState(self.params, self._rng)
            else:
                self._state.advance()
            out.append(self._state.observe(self.rounds_probed))
            self.rounds_probed += 1
        return out


def stack(vectors: Sequence[FeatureVector], features: Sequence[str] = ("gains",)) -> np.ndarray:
    """Rows of ``vector.as_array(features)`` as a 2-D array."""
    return np.vstack([v.as_array(features) for v in vectors])
