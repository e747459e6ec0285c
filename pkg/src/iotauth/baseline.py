"""Conventional physical-layer key generation, kept only as a cost baseline.

RSSI is thresholded at each side's median, block parities are exchanged in
the clear to find and discard mismatched blocks, and the surviving bits are
hashed for privacy amplification.  Every later authentication is a
challenge/response exchange under the derived key.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelProber, ReciprocityParams
from .errors import KeygenFailure
from .transcript import OpCounts, Transcript

CHALLENGE_BITS = 128
RESPONSE_BITS = 256


@dataclass
class KeygenSession:
    key: str
    sensor_key: str
    transcript: Transcript
    op_counts: OpCounts
    rounds_probed: int = 0
    discarded_blocks: int = 0
    attempts: int = 0
    auth_failures: int = 0
    hash_algorithm: str = "sha256"
    _auth_counter: int = field(default=0, repr=False)

    @property
    def agreed(self) -> bool:
        return self.key == self.sensor_key


def _median_bits(rssi: np.ndarray) -> np.ndarray:
    return (rssi > np.median(rssi)).astype(np.uint8)


def _parities(bits: np.ndarray, block: int) -> np.ndarray:
    n = len(bits) // block
    return bits[: n * block].reshape(n, block).sum(1) % 2


def _amplify(bits: str, key_bits: int, algorithm: str) -> str:
    digest = hashlib.new(algorithm, bits.encode("ascii")).digest()
    return "".join(f"{b:08b}" for b in digest)[:key_bits]


def run_keygen_session(
    params: ReciprocityParams,
    key_bits: int,
    rng: np.random.Generator,
    *,
    block_size: int = 4,
    rounds_per_bit: int = 4,
    max_retries: int = 5,
    hash_algorithm: str = "sha256",
) -> KeygenSession:
    """Probe, quantize, reconcile by block parity and amplify into a key.

    Each probing batch adds one parity message from each side.  Batches are
    repeated until at least ``key_bits`` reconciled bits exist or
    ``max_retries`` batches have been used.
    """
    if key_bits < 8:
        raise ValueError("key_bits must be >= 8")
    if key_bits > hashlib.new(hash_algorithm).digest_size * 8:
        raise ValueError("key_bits exceeds the privacy-amplification hash width")
    prober = ChannelProber(params, rng)
    t = Transcript()
    ops = OpCounts()
    g_keep: list[np.ndarray] = []
    s_keep: list[np.ndarray] = []
    discarded = 0
    kept = 0
    attempts = 0
    while kept < key_bits:
        if attempts >= max_retries:
            raise KeygenFailure(f"only {kept} reconciled bits after {attempts} batches, {key_bits} required")
        attempts += 1
        n_rounds = rounds_per_bit * key_bits
        rounds = prober.next_rounds(n_rounds)
        g = _median_bits(np.array([r.gateway_obs.rssi for r in rounds]))
        s = _median_bits(np.array([r.sensor_obs.rssi for r in rounds]))
        pg = _parities(g, block_size)
        ps = _parities(s, block_size)
        n_blocks = len(pg)
        t.add("gateway", "parity", n_blocks)
        t.add("sensor", "parity", n_blocks)  # bitmap of blocks to discard
        good = pg == ps
        discarded += int((~good).sum())
        g_blocks = g[: n_blocks * block_size].reshape(n_blocks, block_size)[good]
        s_blocks = s[: n_blocks * block_size].reshape(n_blocks, block_size)[good]
        g_keep.append(g_blocks.ravel())
        s_keep.append(s_blocks.ravel())
        kept += g_blocks.size
        ops.sensor_computations += n_rounds + n_blocks
        ops.gateway_computations += n_rounds + n_blocks
    g_all = "".join(map(str, np.concatenate(g_keep)))
    s_all = "".join(map(str, np.concatenate(s_keep)))
    key = _amplify(g_all, key_bits, hash_algorithm)
    sensor_key = _amplify(s_all, key_bits, hash_algorithm)
    ops.sensor_computations += 1
    ops.gateway_computations += 1
    ops.messages = len(t)
    return KeygenSession(
        key=key,
        sensor_key=sensor_key,
        transcript=t,
        op_counts=ops,
        rounds_probed=prober.rounds_probed,
        discarded_blocks=discarded,
        attempts=attempts,
        hash_algorithm=hash_algorithm,
    )


def authenticate_with_key(session: KeygenSession, n_times: int) -> OpCounts:
    """Run ``n_times`` challenge/response authentications; return their cost.

    The session's transcript and cumulative ``op_counts`` are updated too.
    """
    if n_times < 0:
        raise ValueError("n_times must be >= 0")
    inc = OpCounts()
    for _ in range(n_times):
        session._auth_counter += 1
        challenge = session._auth_counter.to_bytes(CHALLENGE_BITS // 8, "big")
        session.transcript.add("gateway", "challenge", CHALLENGE_BITS)
        resp = hashlib.new(session.hash_algorithm, session.sensor_key.encode() + challenge).digest()
        session.transcript.add("sensor", "response", RESPONSE_BITS)
        expect = hashlib.new(session.hash_algorithm, session.key.encode() + challenge).digest()
        if resp != expect:
            session.auth_failures += 1
        inc.sensor_computations += 1
        inc.gateway_computations += 1
        inc.messages += 2
    session.op_counts = session.op_counts + inc
    return inc
