"""Seed agreement by boundary transfer and hash verification.

The gateway sends the trained boundary, the indices that survived its guard
band, and a digest of its bit string.  The sensor quantizes its own
measurements at those indices with the received boundary, hashes, and
answers ack or nack.  No bit of the seed, and no function of it other than
the digest, crosses the air.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .channel import FeatureVector
from .errors import InsufficientBits, MismatchError, ZeroState
from .svm import Boundary, QuantizedBits, QuantizerConfig, bits_at
from .transcript import Transcript

ACK_BITS = 8
DIGEST_BITS = 256


@dataclass(frozen=True)
class Seed:
    bits: str

    def __post_init__(self):
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise ValueError("seed must be a non-empty bit string")
        if "1" not in self.bits:
            raise ZeroState("all-zero seed is forbidden")

    @property
    def length(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class HashDigest:
    value: bytes
    algorithm_id: str

    def __post_init__(self):
        if len(self.value) * 8 != DIGEST_BITS:
            raise ValueError("digest must be 256 bits wide")


def _bits_to_bytes(bits: str) -> bytes:
    # Length prefix keeps "0" and "00" distinct.
    n = len(bits)
    packed = int(bits, 2).to_bytes((n + 7) // 8, "big") if n else b""
    return n.to_bytes(8, "big") + packed


def digest_bits(bits: str, algorithm: str = "sha256") -> HashDigest:
    h = hashlib.new(algorithm, _bits_to_bytes(bits))
    if h.digest_size * 8 != DIGEST_BITS:
        raise ValueError(f"{algorithm} is not a 256-bit hash")
    return HashDigest(h.digest(), algorithm)


def index_payload_bits(indices: Sequence[int]) -> int:
    if not indices:
        return 0
    width = max(1, math.ceil(math.log2(max(indices) + 1)))
    return width * len(indices)


def establish_seed(
    gateway_bits: QuantizedBits,
    sensor_probe_fn: Callable[[Sequence[int]], Sequence[FeatureVector]],
    boundary: Boundary,
    config: QuantizerConfig,
    hash_algorithm: str = "sha256",
) -> tuple[Seed, Transcript]:
    """Run the four-message handshake.

    ``sensor_probe_fn(indices)`` returns the sensor's own measurements for
    the given round indices.  The seed is the first ``target_bits`` of the
    gateway's quantized bits.  Raises :class:`MismatchError` (carrying the
    transcript) when the sensor's digest differs, and :class:`ZeroState`
    before any message is sent if the gateway bits are all zero.
    """
    if len(gateway_bits) < config.target_bits:
        raise InsufficientBits(len(gateway_bits), config.target_bits)
    chosen = gateway_bits.truncate(config.target_bits)
    if "1" not in chosen.bits:
        raise ZeroState("gateway bits are all zero; re-probe before the handshake")
    digest = digest_bits(chosen.bits, hash_algorithm)

    t = Transcript()
    t.add("gateway", "boundary", boundary.size_bits())
    t.add("gateway", "kept_indices", index_payload_bits(chosen.kept_indices))
    t.add("gateway", "digest", DIGEST_BITS)

    sensor_obs = sensor_probe_fn(chosen.kept_indices)
    sensor_bits = bits_at(sensor_obs, boundary, range(len(chosen.kept_indices)))
    if digest_bits(sensor_bits, hash_algorithm).value != digest.value:
        t.add("sensor", "nack", ACK_BITS)
        raise MismatchError(t)
    t.add("sensor", "ack", ACK_BITS)
    return Seed(chosen.bits), t
