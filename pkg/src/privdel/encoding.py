"""Key generation, trap-bit sprinkling and key-length accounting.

The sender hides n diagonal-basis trap bits at a uniformly random set of
positions among the m rectilinear-basis message bits. The secret key is
the trap positions plus the trap values; its length in bits is
n + log2(C(m+n, n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qubit import EIGENSTATES, Basis, Qubit, measure_sites

LN2 = math.log(2.0)

#: A message is an ordered sequence of bits, held as a uint8 array.
Message = np.ndarray


def as_bits(bits) -> np.ndarray:
    """Coerce a bit sequence (list, string of 0/1, array) to a uint8 array."""
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit sequence may contain only 0 and 1")
    return arr


def bits_to_string(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits))


def random_message(m: int, rng: np.random.Generator) -> Message:
    if m < 1:
        raise ValueError("message length must be at least 1")
    return rng.integers(0, 2, m, dtype=np.uint8)


@dataclass(frozen=True, slots=True)
class SecretKey:
    """Trap positions and trap values, the verifier's only persistent secret."""

    total_length: int
    trap_positions: np.ndarray
    trap_values: np.ndarray

    def __post_init__(self) -> None:
        pos = self.trap_positions
        vals = self.trap_values
        if pos.size != vals.size or pos.size < 1:
            raise ValueError("need at least one trap and matching position/value counts")
        if pos[0] < 0 or pos[-1] >= self.total_length:
            raise ValueError("trap positions out of range")
        if pos.size > 1 and not (np.diff(pos) > 0).all():
            raise ValueError("trap positions must be strictly increasing")
        if vals.size and vals.max() > 1:
            raise ValueError("trap values must be bits")

    @property
    def num_traps(self) -> int:
        return self.trap_positions.size

    @property
    def message_length(self) -> int:
        return self.total_length - self.num_traps

    def trap_mask(self) -> np.ndarray:
        mask = np.zeros(self.total_length, dtype=bool)
        mask[self.trap_positions] = True
        return mask

    def non_trap_positions(self) -> np.ndarray:
        mask = np.ones(self.total_length, dtype=bool)
        mask[self.trap_positions] = False
        return np.flatnonzero(mask)


@dataclass(slots=True)
class EncodedState:
    """The transmitted train of qubits, one amplitude 2-vector per position."""

    amplitudes: np.ndarray

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def qubit(self, index: int) -> Qubit:
        a0, a1 = self.amplitudes[index]
        return Qubit(float(a0), float(a1))

    def __iter__(self):
        return (self.qubit(i) for i in range(len(self)))

    def copy(self) -> "EncodedState":
        return EncodedState(self.amplitudes.copy())


def generate_key(m: int, n: int, rng: np.random.Generator) -> SecretKey:
    """Draw a fresh secret key: a uniform n-subset of positions plus n random bits.

    All C(m+n, n) position sets are equiprobable (the positions are the
    first n entries of a uniform shuffle, then sorted). Rejects m = 0 and
    n = 0, which degenerate the protocol.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    total = m + n
    positions = np.sort(rng.permutation(total)[:n])
    values = rng.integers(0, 2, n, dtype=np.uint8)
    return SecretKey(total, positions.astype(np.intp), values)


class KeyLength(NamedTuple):
    exact_bits: float
    approx_bits: float


def key_length_bits(m: int, n: int) -> KeyLength:
    """Key length n + log2(C(m+n, n)) in bits, with the n*log2(m) shorthand.

    The exact value is evaluated through log-gamma so it never overflows.
    The shorthand is only meaningful for m >= 1 (it is NaN at m = 0) and
    approaches the exact value as m/n grows.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be non-negative")
    if n == 0:
        return KeyLength(0.0, 0.0)
    log2_binom = (
        math.lgamma(m + n + 1) - math.lgamma(n + 1) - math.lgamma(m + 1)
    ) / LN2
    approx = n * math.log2(m) if m >= 1 else math.nan
    return KeyLength(n + log2_binom, approx)


def encode(message, key: SecretKey) -> EncodedState:
    """Build the transmitted state: traps in the diagonal basis, message elsewhere.

    Position p carries the i-th trap value in the diagonal basis when
    p == trap_positions[i], otherwise the next message bit in the
    rectilinear basis, preserving message order.
    """
    msg = as_bits(message)
    if msg.size != key.message_length:
        raise ValueError(
            f"message length {msg.size} does not match key (expects {key.message_length})"
        )
    total = key.total_length
    bases = np.zeros(total, dtype=np.uint8)
    bases[key.trap_positions] = Basis.DIAGONAL
    bits = np.empty(total, dtype=np.uint8)
    bits[key.trap_positions] = key.trap_values
    mask = np.ones(total, dtype=bool)
    mask[key.trap_positions] = False
    bits[mask] = msg
    return EncodedState(EIGENSTATES[bases, bits])


def decode_non_trap(
    state: EncodedState, key: SecretKey, rng: np.random.Generator
) -> Message:
    """Measure every non-trap position in the rectilinear basis, in order.

    On an undisturbed honest encoding this returns the message exactly.
    Collapses the measured positions in place.
    """
    if len(state) != key.total_length:
        raise ValueError("state length does not match key")
    positions = key.non_trap_positions()
    return measure_sites(state.amplitudes, positions, Basis.RECTILINEAR, rng)


def key_to_json(key: SecretKey) -> dict:
    """JSON object form used to persist and replay instances."""
    return {
        "m": key.message_length,
        "n": key.num_traps,
        "trap_positions": [int(p) for p in key.trap_positions],
        "trap_values": bits_to_string(key.trap_values),
    }


def key_from_json(obj: dict) -> SecretKey:
    positions = np.asarray(obj["trap_positions"], dtype=np.intp)
    values = as_bits(obj["trap_values"])
    total = int(obj["m"]) + int(obj["n"])
    if positions.size != int(obj["n"]):
        raise ValueError("trap position count does not match n")
    return SecretKey(total, positions, values)
