"""Trust values, evidence-escalated updates and progressive authorization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import UnknownEvidenceKind

# An IP address can be forged, so identity evidence of this kind never grants
# full confidence.
INITIAL_TRUST = {"ip_address_check": 0.9}

# Trust values are rounded after every update so that closed-form trajectories
# (e.g. 0.9 - 3 * 0.05) land exactly on their decimal values.
_ROUND = 12


def init_trust(identity_evidence: str) -> float:
    try:
        return INITIAL_TRUST[identity_evidence]
    except KeyError:
        raise UnknownEvidenceKind(f"no initial trust rule for evidence {identity_evidence!r}") from None


@dataclass(frozen=True)
class AuthorizationPolicy:
    """Partition of services into nested levels Phi_0 (empty) ... Phi_{M-1} (all)."""

    thresholds: tuple[float, ...] = (0.2, 0.5)
    service_sets: tuple[frozenset, ...] = (
        frozenset(),
        frozenset({"read_data", "report_status"}),
        frozenset({"read_data", "report_status", "actuate", "configure", "firmware_update"}),
    )

    def __post_init__(self):
        th = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, "thresholds", th)
        object.__setattr__(self, "service_sets", tuple(frozenset(s) for s in self.service_sets))
        if len(th) < 1:
            raise ValueError("need at least one threshold (M >= 2)")
        if any(not 0.0 < t < 1.0 for t in th):
            raise ValueError("thresholds must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("thresholds must be strictly ascending")
        sets = self.service_sets
        if len(sets) != len(th) + 1:
            raise ValueError(f"{len(th) + 1} levels need {len(th) + 1} service sets, got {len(sets)}")
        if sets[0]:
            raise ValueError("Phi_0 must be the empty set")
        if any(not a < b for a, b in zip(sets, sets[1:])):
            raise ValueError("service sets must be strictly nested")

    @property
    def m_levels(self) -> int:
        return len(self.thresholds) + 1

    def services(self, level: int) -> frozenset:
        return self.service_sets[level]


DEFAULT_POLICY = AuthorizationPolicy()


def authorize(trust: float, policy: AuthorizationPolicy = DEFAULT_POLICY) -> int:
    """Authorization level = number of thresholds at or below ``trust``."""
    if not 0.0 <= trust <= 1.0:
        raise ValueError(f"trust must lie in [0, 1], got {trust}")
    return sum(trust >= t for t in policy.thresholds)


@dataclass(frozen=True)
class UpdateRule:
    reward: float = 0.01
    penalty_base: float = 0.05
    escalation: float = 1.0

    def __post_init__(self):
        if not self.reward > 0 or not self.penalty_base > 0:
            raise ValueError("reward and penalty_base must be > 0")
        if not self.escalation >= 1:
            raise ValueError("escalation must be >= 1")


@dataclass(frozen=True)
class EvidenceBundle:
    """One observation's worth of evidence.

    ``feature_flags`` maps each monitored feature to True when it looked
    anomalous.  ``attack_detected`` is None when attacking behaviour is not
    one of the sources consulted.
    """

    feature_flags: Mapping[str, bool]
    attack_detected: bool | None = None

    @property
    def source_count(self) -> int:
        return len(self.feature_flags) + (self.attack_detected is not None)

    @property
    def adverse_count(self) -> int:
        return sum(bool(v) for v in self.feature_flags.values()) + bool(self.attack_detected)


@dataclass(frozen=True)
class TrustRecord:
    device_id: str
    trust: float
    history: tuple[tuple[int, float, int], ...] = field(default=())

    def __post_init__(self):
        if not 0.0 <= self.trust <= 1.0:
            raise ValueError("trust must lie in [0, 1]")

    @classmethod
    def new(cls, device_id: str, trust: float, policy: AuthorizationPolicy = DEFAULT_POLICY) -> "TrustRecord":
        return cls(device_id, trust, ((0, trust, authorize(trust, policy)),))

    @property
    def step(self) -> int:
        return self.history[-1][0] if self.history else 0

    @property
    def level(self) -> int:
        return self.history[-1][2] if self.history else authorize(self.trust)


def penalty(adverse: int, rule: UpdateRule) -> float:
    return rule.penalty_base * adverse**rule.escalation


def update_trust(
    record: TrustRecord,
    evidence: EvidenceBundle,
    rule: UpdateRule = UpdateRule(),
    policy: AuthorizationPolicy = DEFAULT_POLICY,
) -> TrustRecord:
    """Reward a clean observation; punish harder the more indicators agree."""
    c = evidence.adverse_count
    if c == 0:
        trust = min(1.0, record.trust + rule.reward)
    else:
        trust = max(0.0, record.trust - penalty(c, rule))
    trust = round(trust, _ROUND)
    entry = (record.step + 1, trust, authorize(trust, policy))
    return TrustRecord(record.device_id, trust, record.history + (entry,))


def aggregate_recommendations(
    own: float,
    recs: Sequence[tuple[str, float, float]],
    own_weight: float = 1.0,
) -> float:
    """Credibility-weighted mean of the own trust value and recommendations."""
    num = own_weight * own
    den = own_weight
    for _, value, cred in recs:
        if not (0.0 <= value <= 1.0 and 0.0 <= cred <= 1.0):
            raise ValueError("recommendation values and credibilities must lie in [0, 1]")
        num += cred * value
        den += cred
    if den == 0:
        return own
    return min(1.0, max(0.0, num / den))


def penalize_recommender(
    credibility: float,
    recommendation: float,
    outcome: float,
    rate: float,
    kappa: float = 0.1,
) -> float:
    """Shrink a recommender's credibility by how far it was off; small reward when right."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    err = abs(recommendation - outcome)
    cred = credibility - rate * err + rate * (1.0 - err) * kappa
    return min(1.0, max(0.0, cred))
