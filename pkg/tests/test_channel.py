import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iotauth.channel import (
    ChannelProber,
    FeatureVector,
    ReciprocityParams,
    probe,
    probe_sequence,
    stack,
)


def gains(rounds, side):
    return stack([getattr(r, side) for r in rounds])


def fresh_probes(params, n, seed):
    rng = np.random.default_rng(seed)
    return [probe(params, rng) for _ in range(n)]


def test_noiseless_reciprocity():
    params = ReciprocityParams.from_noise(0.0, dims=3)
    assert params.rho == 1.0
    r = probe(params, np.random.default_rng(0))
    assert r.sensor_obs == r.gateway_obs
    assert r.eve_obs != r.gateway_obs


def test_sigma_n_derivation():
    p = ReciprocityParams(0.8)
    assert p.sigma_n == pytest.approx(np.sqrt(0.2))
    assert ReciprocityParams.from_noise(p.sigma_n).rho == pytest.approx(0.8)


@pytest.mark.parametrize("rho", [0.8, 0.9, 0.95, 0.99])
def test_reciprocity_calibration(rho):
    rounds = fresh_probes(ReciprocityParams(rho, dims=2), 10_000, seed=11)
    g, s = gains(rounds, "gateway_obs"), gains(rounds, "sensor_obs")
    for k in range(2):
        assert abs(np.corrcoef(g[:, k], s[:, k])[0, 1] - rho) <= 0.01
    rssi_g = [r.gateway_obs.rssi for r in rounds]
    rssi_s = [r.sensor_obs.rssi for r in rounds]
    assert abs(np.corrcoef(rssi_g, rssi_s)[0, 1] - rho) <= 0.01


def test_eavesdropper_independent():
    rounds = fresh_probes(ReciprocityParams(0.95), 10_000, seed=5)
    g, e = gains(rounds, "gateway_obs"), gains(rounds, "eve_obs")
    s = gains(rounds, "sensor_obs")
    assert abs(np.corrcoef(g[:, 0], e[:, 0])[0, 1]) < 0.05
    assert abs(np.corrcoef(s[:, 0], e[:, 0])[0, 1]) < 0.05


def test_determinism():
    p = ReciprocityParams(0.9, dims=4, drift_rate=0.3)
    a = probe_sequence(p, 50, np.random.default_rng(42))
    b = probe_sequence(p, 50, np.random.default_rng(42))
    assert a == b


def test_frozen_channel_rounds_identical():
    p = ReciprocityParams(1.0, dims=2, drift_rate=0.0)
    rounds = probe_sequence(p, 10, np.random.default_rng(0))
    assert all(r.gateway_obs == rounds[0].gateway_obs for r in rounds)
    assert all(r.sensor_obs == rounds[0].sensor_obs for r in rounds)
    assert [r.round_index for r in rounds] == list(range(10))


def test_single_round_sequence_matches_probe():
    p = ReciprocityParams(0.9, dims=3, drift_rate=0.5)
    seq = probe_sequence(p, 1, np.random.default_rng(3))
    assert seq == [probe(p, np.random.default_rng(3))]


def test_drift_autocorrelation_between_zero_and_one():
    # Noiseless observations expose the latent directly.
    p = ReciprocityParams(1.0, dims=1, drift_rate=0.3)
    x = gains(probe_sequence(p, 20_000, np.random.default_rng(1)), "gateway_obs")[:, 0]
    lag1 = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert 0.0 < lag1 < 1.0
    # Stationary AR(1) with innovation weight a has lag-1 correlation sqrt(1 - a^2).
    assert lag1 == pytest.approx(np.sqrt(1 - 0.3**2), abs=0.01)


def test_prober_matches_sequence():
    p = ReciprocityParams(0.9, drift_rate=0.7)
    prober = ChannelProber(p, np.random.default_rng(8))
    got = prober.next_rounds(7) + prober.next_rounds(5)
    assert got == probe_sequence(p, 12, np.random.default_rng(8))


@pytest.mark.parametrize("kwargs", [{"rho": -0.1}, {"rho": 1.1}, {"rho": 0.5, "dims": 0}, {"rho": 0.5, "drift_rate": -1}])
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ValueError):
        ReciprocityParams(**kwargs)


def test_feature_vector_rejects_non_finite():
    with pytest.raises(ValueError):
        FeatureVector(float("nan"), 0.0, (1.0,))
    with pytest.raises(ValueError):
        FeatureVector(0.0, 0.0, ())


@settings(max_examples=30, deadline=None)
@given(rho=st.floats(0, 1), dims=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_components_finite_and_dimensioned(rho, dims, seed):
    r = probe(ReciprocityParams(rho, dims=dims), np.random.default_rng(seed))
    for v in (r.sensor_obs, r.gateway_obs, r.eve_obs):
        assert v.dims == dims
        assert np.all(np.isfinite(v.as_array(("rssi", "cfo", "gains"))))
