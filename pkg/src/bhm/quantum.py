"""Exact simulation of the one-way quantum protocol.

Alice encodes her 2n-bit string as the sign pattern of a uniform
superposition over 2n basis states, so the message costs ceil(log2(2n))
qubits.  Bob measures in the basis {(|k> + |l>)/sqrt2, (|k> - |l>)/sqrt2}
over his matching edges; the outcome reveals one uniformly random edge
together with its exact parity, and Bob answers parity xor w for that
edge.  Amplitudes stay real throughout: the protocol never creates a
complex phase.

Measurement is implemented twice: a generic projector path that builds
the explicit basis and samples from the squared inner products, and an
analytic shortcut (uniform edge, sign forced by the parity).  The two
agree in distribution; tests hold them together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BitString, PerfectMatching, apply_matching
from .errors import DimensionMismatch
from .instances import BhmInstance


@dataclass(frozen=True, eq=False)
class MessageState:
    """Real amplitude vector with entries +-1/sqrt(dim)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.float64).copy()
        if amps.ndim != 1 or amps.size < 2 or amps.size % 2 != 0:
            raise ValueError("amplitude vector must have even length >= 2")
        scale = 1.0 / math.sqrt(amps.size)
        if not np.allclose(np.abs(amps), scale, atol=1e-12):
            raise ValueError("amplitudes must all be +-1/sqrt(dim)")
        if abs(float(amps @ amps) - 1.0) > 1e-12:
            raise ValueError("state is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class MeasurementOutcome:
    """Measured edge (1-based) and the sign of the observed basis vector."""

    edge_index: int
    sign: int

    def parity(self) -> int:
        """Edge parity revealed with certainty: 0 for +, 1 for -."""
        return 0 if self.sign > 0 else 1


@dataclass(frozen=True)
class TrialReport:
    """Outcome record of one protocol run."""

    guess: int
    truth: int | None
    shots: int
    qubit_cost: int
    seed: int | None = None

    @property
    def correct(self) -> bool | None:
        return None if self.truth is None else self.guess == self.truth


def message_qubits(n: int) -> int:
    """Qubits per message: ceil(log2(2n))."""
    if n < 1:
        raise ValueError("n must be positive")
    return (2 * n - 1).bit_length()


def prepare_state(x: BitString) -> MessageState:
    """Alice's message state: amplitude i is (-1)^x_i / sqrt(2n)."""
    if x.length % 2 != 0:
        raise DimensionMismatch("message state needs an even-length string")
    signs = 1.0 - 2.0 * x.to_array().astype(np.float64)
    return MessageState(amplitudes=signs / math.sqrt(x.length))


def matching_basis(matching: PerfectMatching) -> np.ndarray:
    """Explicit orthonormal basis; rows 2i and 2i+1 are the +- vectors of edge i."""
    dim = matching.size
    basis = np.zeros((dim, dim))
    root_half = 1.0 / math.sqrt(2.0)
    for i, (k, l) in enumerate(matching.edges):
        basis[2 * i, k - 1] = root_half
        basis[2 * i, l - 1] = root_half
        basis[2 * i + 1, k - 1] = root_half
        basis[2 * i + 1, l - 1] = -root_half
    return basis


def outcome_probabilities(state: MessageState, matching: PerfectMatching) -> np.ndarray:
    """Squared inner products against the explicit basis, ordered like its rows."""
    if state.dim != matching.size:
        raise DimensionMismatch(
            f"state dimension {state.dim} vs matching on {matching.size} points"
        )
    overlaps = matching_basis(matching) @ state.amplitudes
    return overlaps**2


def _edge_parity(state: MessageState, matching: PerfectMatching, i: int) -> int:
    k, l = matching.edges[i]
    return 0 if state.amplitudes[k - 1] * state.amplitudes[l - 1] > 0 else 1


def measure_matching_basis(
    state: MessageState,
    matching: PerfectMatching,
    rng: np.random.Generator,
    method: str = "analytic",
) -> MeasurementOutcome:
    """Sample one measurement outcome.

    ``projector`` samples from the squared inner products of the explicit
    basis; ``analytic`` draws a uniform edge and sets the sign from the
    parity.  Either way the sign is checked against the true parity: the
    protocol's whole point is that it never disagrees.
    """
    if state.dim != matching.size:
        raise DimensionMismatch(
            f"state dimension {state.dim} vs matching on {matching.size} points"
        )
    if method == "projector":
        probs = outcome_probabilities(state, matching)
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"outcome probabilities sum to {total!r}")
        idx = int(rng.choice(probs.size, p=probs / total))
        edge, sign = divmod(idx, 2)
        outcome = MeasurementOutcome(edge_index=edge + 1, sign=1 if sign == 0 else -1)
    elif method == "analytic":
        edge = int(rng.integers(matching.n))
        parity = _edge_parity(state, matching, edge)
        outcome = MeasurementOutcome(edge_index=edge + 1, sign=1 if parity == 0 else -1)
    else:
        raise ValueError(f"unknown measurement method {method!r}")
    assert outcome.parity() == _edge_parity(state, matching, outcome.edge_index - 1)
    return outcome


def run_single(
    inst: BhmInstance, rng: np.random.Generator, method: str = "analytic"
) -> int:
    """One protocol execution; returns Bob's guess (edge parity xor w)."""
    state = prepare_state(inst.x)
    outcome = measure_matching_basis(state, inst.matching, rng, method=method)
    return outcome.parity() ^ inst.w.bit(outcome.edge_index)


def run_repeated(
    inst: BhmInstance, r: int, rng: np.random.Generator, method: str = "analytic"
) -> TrialReport:
    """Majority vote over r independent runs, each with a fresh message state."""
    if r < 1 or r % 2 == 0:
        raise ValueError(f"repetitions must be odd and positive, got {r}")
    if method == "analytic":
        # same per-shot distribution as r run_single calls, batched
        disagree = _disagreement_bits(inst)
        guesses = disagree[rng.integers(0, inst.n, size=r)]
        ones = int(guesses.sum())
    else:
        ones = sum(run_single(inst, rng, method=method) for _ in range(r))
    guess = 1 if 2 * ones > r else 0
    return TrialReport(
        guess=guess,
        truth=inst.source,
        shots=r,
        qubit_cost=r * message_qubits(inst.n),
    )


def _disagreement_bits(inst: BhmInstance) -> np.ndarray:
    parities = apply_matching(inst.matching, inst.x)
    return parities.to_array() ^ inst.w.to_array()


def empirical_success(inst: BhmInstance, shots: int, rng: np.random.Generator) -> float:
    """Fraction of single-shot guesses matching the source over many shots."""
    if inst.source is None:
        raise ValueError("instance has no source label")
    if shots < 1:
        raise ValueError("shots must be positive")
    disagree = _disagreement_bits(inst)
    guesses = disagree[rng.integers(0, inst.n, size=shots)]
    return float(np.mean(guesses == inst.source))


def majority_success(p: Fraction | float, r: int) -> Fraction | float:
    """P[Binomial(r, p) > r/2] for odd r; exact when p is a Fraction."""
    if r < 1 or r % 2 == 0:
        raise ValueError(f"repetitions must be odd and positive, got {r}")
    q = 1 - p
    return sum(math.comb(r, j) * p**j * q ** (r - j) for j in range((r + 1) // 2, r + 1))


def exact_success(inst: BhmInstance, r: int = 1) -> Fraction:
    """Exact probability that the r-shot majority guess equals the source.

    Single-shot success is (n - d)/n for source 0 and d/n for source 1,
    with d the number of w positions disagreeing with the edge parities.
    """
    if inst.source is None:
        raise ValueError("instance has no source label")
    d = inst.disagreements()
    p = Fraction(inst.n - d, inst.n) if inst.source == 0 else Fraction(d, inst.n)
    result = majority_success(p, r)
    assert isinstance(result, Fraction)
    return result
