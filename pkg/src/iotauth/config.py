"""Scenario configuration: dataclasses, YAML loading and validation.

Every tunable constant has its default here; ``defaults.yaml`` shipped
next to this module is a human-readable copy checked against these classes
by the test suite.  ``channel.rho`` has no default and must be given.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError

FORMAT_VERSION = "1"
DEFAULTS_PATH = Path(__file__).with_name("defaults.yaml")

REQUIRED = object()


@dataclass
class ChannelConfig:
    rho: float = REQUIRED  # type: ignore[assignment]
    dims: int = 2
    drift_rate: float = 1.0


@dataclass
class QuantizerSection:
    guard_epsilon: float = 0.5
    soft_margin_C: float = 10.0
    target_bits: int = 128
    kernel: str = "rbf"
    gamma: typing.Optional[float] = None  # None means 1 / dims
    features: list[str] = field(default_factory=lambda: ["gains"])
    probe_rounds: int = 512
    train_rounds: int = 200
    max_attempts: int = 5
    hash: str = "sha256"


@dataclass
class LfsrSection:
    degree: int = 16
    taps: typing.Optional[list[int]] = None  # None means the shipped maximal taps


@dataclass
class AccessSection:
    mode: str = "time_slots"
    slots_per_frame: int = 16
    window: int = 8
    max_misses: int = 0
    frame_loss: float = 0.0


@dataclass
class TrustSection:
    reward: float = 0.01
    penalty_base: float = 0.05
    escalation: float = 1.0
    initial_evidence: str = "ip_address_check"
    thresholds: list[float] = field(default_factory=lambda: [0.2, 0.5])


@dataclass
class DetectorSection:
    k_sigma: float = 3.0
    warmup_n: int = 30
    p_detect: float = 0.9
    p_false: float = 0.0


@dataclass
class BaselineSection:
    block_size: int = 4
    rounds_per_bit: int = 4
    max_attempts: int = 5


@dataclass
class AdversarySpec:
    kind: str = REQUIRED  # type: ignore[assignment]
    target: int = 0
    duty_cycle: float = 0.5
    period: int = 10
    rssi_offset: float = 4.0  # in units of the legitimate feature std
    cfo_offset: float = 4.0
    feature_noise: float = 1.0


@dataclass
class RecommenderSpec:
    id: str = REQUIRED  # type: ignore[assignment]
    bias: float = 0.0
    credibility: float = 1.0


@dataclass
class ScenarioConfig:
    channel: ChannelConfig = REQUIRED  # type: ignore[assignment]
    rng_seed: int = 0
    n_sensors: int = 4
    n_steps: int = 400
    evidence_source_counts: list[int] = field(default_factory=lambda: [1, 2, 3])
    quantizer: QuantizerSection = field(default_factory=QuantizerSection)
    lfsr: LfsrSection = field(default_factory=LfsrSection)
    access: AccessSection = field(default_factory=AccessSection)
    trust: TrustSection = field(default_factory=TrustSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    baseline: BaselineSection = field(default_factory=BaselineSection)
    adversaries: list[AdversarySpec] = field(default_factory=list)
    recommenders: list[RecommenderSpec] = field(default_factory=list)
    recommender_rate: float = 0.1
    own_weight: float = 1.0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


ADVERSARY_KINDS = ("spoofer", "eavesdropper", "misdetected")


# --- loading -------------------------------------------------------------


def _compose(text: str) -> tuple[Any, dict[str, int]]:
    """Parse YAML and record the source line of every dotted key."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError("<file>", f"invalid YAML: {exc}", mark.line + 1 if mark else None) from None
    lines: dict[str, int] = {}

    def walk(n, path):
        if n is None:
            return None
        lines.setdefault(path, n.start_mark.line + 1)
        if isinstance(n, yaml.MappingNode):
            out = {}
            for k, v in n.value:
                key = str(k.value)
                sub = f"{path}.{key}" if path else key
                lines[sub] = k.start_mark.line + 1
                out[key] = walk(v, sub)
            return out
        if isinstance(n, yaml.SequenceNode):
            return [walk(v, f"{path}[{i}]") for i, v in enumerate(n.value)]
        return yaml.safe_load(yaml.serialize(n))

    return walk(node, ""), lines


def _check_scalar(tp, value, path, lines):
    line = lines.get(path)
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}", line)
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}", line)
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}", line)
        return value
    raise TypeError(tp)


def _convert(tp, value, path, lines):
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _convert(args[0], value, path, lines)
    if origin is list:
        (item,) = typing.get_args(tp)
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list, got {value!r}", lines.get(path))
        return [_convert(item, v, f"{path}[{i}]", lines) for i, v in enumerate(value)]
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path, lines)
    return _check_scalar(tp, value, path, lines)


def _build(cls, data, path, lines):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(path or "<root>", "expected a mapping", lines.get(path))
    hints = typing.get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    for key in data:
        if key not in fields:
            sub = f"{path}.{key}" if path else key
            raise ConfigError(sub, "unknown field", lines.get(sub))
    kwargs = {}
    for name, f in fields.items():
        sub = f"{path}.{name}" if path else name
        if name in data:
            kwargs[name] = _convert(hints[name], data[name], sub, lines)
        elif f.default is REQUIRED:
            if dataclasses.is_dataclass(hints[name]):
                kwargs[name] = _build(hints[name], {}, sub, lines)
            else:
                raise ConfigError(sub, "missing required field", lines.get(path) if path else None)
    return cls(**kwargs)


def _set_dotted(data: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    cur = data
    for p in parts[:-1]:
        nxt = cur.get(p)
        if nxt is None:
            nxt = cur[p] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(dotted, "cannot override inside a non-mapping value")
        cur = nxt
    cur[parts[-1]] = value


def load_config(source: str | Path | dict, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    """Build a validated :class:`ScenarioConfig` from a YAML file path or a dict.

    ``overrides`` maps dotted keys (``channel.rho``) to values applied on top.
    """
    if isinstance(source, dict):
        return _from_data(source, {}, overrides)
    data, lines = _compose(Path(source).read_text(encoding="utf-8"))
    return _from_data(data, lines, overrides)


def load_config_text(text: str, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    data, lines = _compose(text)
    return _from_data(data, lines, overrides)


def _from_data(data, lines, overrides) -> ScenarioConfig:
    data = json.loads(json.dumps(data)) if data is not None else {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a mapping at top level", 1)
    for k, v in (overrides or {}).items():
        _set_dotted(data, k, v)
    cfg = _build(ScenarioConfig, data, "", lines)
    validate(cfg, lines)
    return cfg


def default_config(rho: float, **changes) -> ScenarioConfig:
    cfg = ScenarioConfig(channel=ChannelConfig(rho=rho))
    cfg = dataclasses.replace(cfg, **changes)
    validate(cfg)
    return cfg


def _require(cond: bool, path: str, message: str, lines: dict[str, int]) -> None:
    if not cond:
        raise ConfigError(path, message, lines.get(path))


def validate(cfg: ScenarioConfig, lines: dict[str, int] | None = None) -> None:
    from .prbs import SHIPPED_SPECS, MODES
    from .reconcile import DIGEST_BITS

    L = lines or {}
    r = _require
    r(cfg.n_sensors >= 1, "n_sensors", "must be >= 1", L)
    r(cfg.n_steps >= 1, "n_steps", "must be >= 1", L)
    r(len(cfg.evidence_source_counts) >= 1, "evidence_source_counts", "must not be empty", L)
    for i, s in enumerate(cfg.evidence_source_counts):
        r(s in (1, 2, 3), f"evidence_source_counts[{i}]", "must be 1, 2 or 3", L)

    c = cfg.channel
    r(0.0 <= c.rho <= 1.0, "channel.rho", "must lie in [0, 1]", L)
    r(c.dims >= 1, "channel.dims", "must be >= 1", L)
    r(0.0 <= c.drift_rate <= 1.0, "channel.drift_rate", "must lie in [0, 1]", L)

    q = cfg.quantizer
    r(q.guard_epsilon >= 0, "quantizer.guard_epsilon", "must be >= 0", L)
    r(q.soft_margin_C > 0, "quantizer.soft_margin_C", "must be > 0", L)
    r(q.target_bits >= 1, "quantizer.target_bits", "must be >= 1", L)
    r(q.kernel in ("linear", "rbf"), "quantizer.kernel", "must be 'linear' or 'rbf'", L)
    r(q.gamma is None or q.gamma > 0, "quantizer.gamma", "must be > 0", L)
    r(len(q.features) >= 1, "quantizer.features", "must select at least one feature group", L)
    for i, f in enumerate(q.features):
        r(f in ("rssi", "cfo", "gains"), f"quantizer.features[{i}]", "must be rssi, cfo or gains", L)
    r(q.train_rounds >= 2, "quantizer.train_rounds", "must be >= 2", L)
    r(q.probe_rounds >= q.train_rounds, "quantizer.probe_rounds", "must be >= train_rounds", L)
    r(q.probe_rounds >= q.target_bits, "quantizer.probe_rounds", "must be >= target_bits", L)
    r(q.max_attempts >= 1, "quantizer.max_attempts", "must be >= 1", L)
    try:
        hash_ok = hashlib.new(q.hash).digest_size * 8 == DIGEST_BITS
    except ValueError:
        hash_ok = False
    r(hash_ok, "quantizer.hash", "must name an available 256-bit hash", L)

    lf = cfg.lfsr
    if lf.taps is None:
        r(lf.degree in SHIPPED_SPECS, "lfsr.degree", f"no shipped taps for degree {lf.degree}; give lfsr.taps", L)
    else:
        r(lf.degree >= 2, "lfsr.degree", "must be >= 2", L)
        r(lf.degree in lf.taps, "lfsr.taps", "must include the degree", L)
        r(all(1 <= t <= lf.degree for t in lf.taps), "lfsr.taps", "positions must lie in 1..degree", L)

    a = cfg.access
    r(a.mode in MODES, "access.mode", f"must be one of {MODES}", L)
    s = a.slots_per_frame
    r(s >= 2 and s & (s - 1) == 0, "access.slots_per_frame", "must be a power of two >= 2", L)
    r(a.window >= 1, "access.window", "must be >= 1 (an empty window accepts anyone)", L)
    r(0 <= a.max_misses < a.window, "access.max_misses", "must lie in [0, window)", L)
    r(0.0 <= a.frame_loss <= 1.0, "access.frame_loss", "must lie in [0, 1]", L)

    t = cfg.trust
    r(t.reward > 0, "trust.reward", "must be > 0", L)
    r(t.penalty_base > 0, "trust.penalty_base", "must be > 0", L)
    r(t.escalation >= 1, "trust.escalation", "must be >= 1", L)
    r(len(t.thresholds) >= 1, "trust.thresholds", "need at least one threshold", L)
    r(all(0 < x < 1 for x in t.thresholds), "trust.thresholds", "must lie strictly inside (0, 1)", L)
    r(all(b > x for x, b in zip(t.thresholds, t.thresholds[1:])), "trust.thresholds", "must be strictly ascending", L)
    from .trust import INITIAL_TRUST

    r(t.initial_evidence in INITIAL_TRUST, "trust.initial_evidence", f"must be one of {sorted(INITIAL_TRUST)}", L)

    d = cfg.detector
    r(d.k_sigma > 0, "detector.k_sigma", "must be > 0", L)
    r(d.warmup_n >= 2, "detector.warmup_n", "must be >= 2", L)
    r(0 <= d.p_detect <= 1, "detector.p_detect", "must lie in [0, 1]", L)
    r(0 <= d.p_false <= 1, "detector.p_false", "must lie in [0, 1]", L)

    b = cfg.baseline
    r(b.block_size >= 1, "baseline.block_size", "must be >= 1", L)
    r(b.rounds_per_bit >= 1, "baseline.rounds_per_bit", "must be >= 1", L)
    r(b.max_attempts >= 1, "baseline.max_attempts", "must be >= 1", L)
    r(8 <= q.target_bits <= DIGEST_BITS, "quantizer.target_bits", "baseline key length must lie in [8, 256]", L)

    for i, adv in enumerate(cfg.adversaries):
        p = f"adversaries[{i}]"
        r(adv.kind in ADVERSARY_KINDS, f"{p}.kind", f"must be one of {ADVERSARY_KINDS}", L)
        r(0 <= adv.target < cfg.n_sensors, f"{p}.target", "must name an existing sensor", L)
        r(0.0 <= adv.duty_cycle <= 1.0, f"{p}.duty_cycle", "must lie in [0, 1]", L)
        r(adv.period >= 1, f"{p}.period", "must be >= 1", L)
        r(adv.feature_noise >= 0, f"{p}.feature_noise", "must be >= 0", L)
    for i, rec in enumerate(cfg.recommenders):
        r(0.0 <= rec.credibility <= 1.0, f"recommenders[{i}].credibility", "must lie in [0, 1]", L)
    r(cfg.recommender_rate > 0, "recommender_rate", "must be > 0", L)
    r(cfg.own_weight >= 0, "own_weight", "must be >= 0", L)
