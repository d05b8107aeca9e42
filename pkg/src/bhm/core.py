"""Bitstring and perfect-matching primitives.

The public model is 1-based: bit i of a length-m string is addressed by
i in 1..m.  A perfect matching on {1..2n} is held as n disjoint pairs
(k, l) with k < l, sorted by k; row i of its 0/1 matrix is edge i, so
the matrix-vector product over GF(2) reduces to one parity per edge.

All types are immutable value types with structural equality and can be
shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class BitString:
    """Immutable fixed-length 0/1 sequence."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if len(bits) == 0:
            raise ValueError("bitstring length must be positive")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bitstring entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls((0,) * length)

    @classmethod
    def from_text(cls, text: str) -> BitString:
        """Parse a '0'/'1' string; position 1 is the leftmost character."""
        if not text or any(c not in "01" for c in text):
            raise ValueError(f"not a bitstring: {text!r}")
        return cls(tuple(1 if c == "1" else 0 for c in text))

    @classmethod
    def from_array(cls, values: Sequence[int] | np.ndarray) -> BitString:
        return cls(tuple(int(v) for v in values))

    @classmethod
    def from_index(cls, length: int, index: int) -> BitString:
        """Unpack a cube-table index; position i holds bit 2**(i-1)."""
        if not 0 <= index < (1 << length):
            raise ValueError(f"index {index} out of range for length {length}")
        return cls(tuple((index >> i) & 1 for i in range(length)))

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def bit(self, i: int) -> int:
        """Bit at 1-based position i."""
        if not 1 <= i <= len(self.bits):
            raise IndexError(f"position {i} out of range 1..{len(self.bits)}")
        return self.bits[i - 1]

    def to_text(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def to_index(self) -> int:
        """Cube-table index; inverse of :meth:`from_index`."""
        idx = 0
        for i, b in enumerate(self.bits):
            idx |= b << i
        return idx

    def hamming_weight(self) -> int:
        return sum(self.bits)

    def __xor__(self, other: BitString) -> BitString:
        if len(other.bits) != len(self.bits):
            raise DimensionMismatch(
                f"xor of lengths {len(self.bits)} and {len(other.bits)}"
            )
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __repr__(self) -> str:
        return f"BitString({self.to_text()!r})"


@dataclass(frozen=True)
class PerfectMatching:
    """n disjoint pairs covering {1..2n}, canonicalized at construction.

    Canonical form: k < l inside every pair, pairs sorted by k.  Any
    permutation of the same pairs constructs an equal object, and edge i
    (1-based) always means the i-th pair of the canonical order.
    """

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = []
        for pair in self.edges:
            k, l = (int(v) for v in pair)
            if k == l:
                raise ValueError(f"degenerate edge ({k}, {l})")
            pairs.append((k, l) if k < l else (l, k))
        pairs.sort()
        members = sorted(v for pair in pairs for v in pair)
        if not pairs or members != list(range(1, 2 * len(pairs) + 1)):
            raise ValueError("edges must cover {1..2n} exactly once")
        object.__setattr__(self, "edges", tuple(pairs))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> PerfectMatching:
        return cls(tuple(pairs))

    @classmethod
    def from_text(cls, text: str) -> PerfectMatching:
        """Parse the 'k1-l1,k2-l2,...' encoding."""
        try:
            pairs = tuple(
                tuple(int(v) for v in chunk.split("-")) for chunk in text.split(",")
            )
        except ValueError as exc:
            raise ValueError(f"not a matching: {text!r}") from exc
        if any(len(p) != 2 for p in pairs):
            raise ValueError(f"not a matching: {text!r}")
        return cls(pairs)  # type: ignore[arg-type]

    @property
    def n(self) -> int:
        """Number of edges."""
        return len(self.edges)

    @property
    def size(self) -> int:
        """Number of matched points, 2n."""
        return 2 * len(self.edges)

    def to_text(self) -> str:
        return ",".join(f"{k}-{l}" for k, l in self.edges)

    def pairs_array(self) -> np.ndarray:
        """Edges as a 0-based (n, 2) integer array."""
        return np.array(self.edges, dtype=np.int64) - 1

    def matrix(self) -> np.ndarray:
        """Explicit (n x 2n) 0/1 matrix; row i marks the endpoints of edge i."""
        mat = np.zeros((self.n, self.size), dtype=np.uint8)
        for i, (k, l) in enumerate(self.edges):
            mat[i, k - 1] = 1
            mat[i, l - 1] = 1
        return mat

    def __repr__(self) -> str:
        return f"PerfectMatching({self.to_text()!r})"


def hamming_distance(a: BitString, b: BitString) -> int:
    """Number of positions where a and b differ."""
    if a.length != b.length:
        raise DimensionMismatch(f"lengths {a.length} and {b.length}")
    return sum(u != v for u, v in zip(a.bits, b.bits))


def apply_matching(matching: PerfectMatching, x: BitString) -> BitString:
    """Edge-parity product: bit i of the result is x_k xor x_l for edge i."""
    if x.length != matching.size:
        raise DimensionMismatch(
            f"matching on {matching.size} points applied to length {x.length}"
        )
    return BitString(tuple(x.bits[k - 1] ^ x.bits[l - 1] for k, l in matching.edges))


def lift_character(matching: PerfectMatching, s: BitString) -> BitString:
    """Transpose action: copy bit i of s to both endpoints of edge i.

    The lift doubles the hamming weight and is adjoint to
    :func:`apply_matching`: <Mx, s> = <x, lift(s)> over GF(2).
    """
    if s.length != matching.n:
        raise DimensionMismatch(
            f"matching with {matching.n} edges lifted with length {s.length}"
        )
    out = [0] * matching.size
    for i, (k, l) in enumerate(matching.edges):
        out[k - 1] = out[l - 1] = s.bits[i]
    return BitString(tuple(out))
