"""Over-the-air message log shared by the lightweight handshake and the baseline."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterator

SENDERS = ("gateway", "sensor")
PAYLOAD_KINDS = (
    "boundary",
    "kept_indices",
    "digest",
    "ack",
    "nack",
    "parity",
    "key_material",
    "challenge",
    "response",
)
# Kinds whose payload is a function of secret bits.
LEAKING_KINDS = frozenset({"parity", "key_material"})


@dataclass(frozen=True)
class Message:
    sender: str
    payload_kind: str
    size_bits: int


@dataclass
class Transcript:
    messages: list[Message] = field(default_factory=list)

    def add(self, sender: str, payload_kind: str, size_bits: int) -> None:
        if sender not in SENDERS:
            raise ValueError(f"unknown sender {sender!r}")
        if payload_kind not in PAYLOAD_KINDS:
            raise ValueError(f"unknown payload kind {payload_kind!r}")
        if size_bits < 0:
            raise ValueError("size_bits must be >= 0")
        self.messages.append(Message(sender, payload_kind, int(size_bits)))

    def __len__(self) -> int:
        return len(self.messages)

    def __iter__(self) -> Iterator[Message]:
        return iter(self.messages)

    def kinds(self) -> list[str]:
        return [m.payload_kind for m in self.messages]

    def total_bits(self) -> int:
        return sum(m.size_bits for m in self.messages)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sender", "payload_kind", "size_bits"])
        for m in self.messages:
            w.writerow([m.sender, m.payload_kind, m.size_bits])
        return buf.getvalue()


def assert_no_secret_leak(t: Transcript) -> bool:
    """True iff no message carries parity bits or key material."""
    return not any(m.payload_kind in LEAKING_KINDS for m in t)


@dataclass
class OpCounts:
    """Coarse cost counters: abstract computation units per side and messages."""

    sensor_computations: int = 0
    gateway_computations: int = 0
    messages: int = 0

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            self.sensor_computations + other.sensor_computations,
            self.gateway_computations + other.gateway_computations,
            self.messages + other.messages,
        )

    def as_dict(self) -> dict:
        return {
            "sensor_computations": self.sensor_computations,
            "gateway_computations": self.gateway_computations,
            "messages": self.messages,
        }
