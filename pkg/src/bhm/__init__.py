"""Simulators and exact numerical verifiers for the Boolean hidden
matching problem: the log-cost quantum one-way protocol, classical
one-way baselines, and the Fourier/combinatorial identities behind
their separation."""

from .core import (
    BitString,
    PerfectMatching,
    apply_matching,
    hamming_distance,
    lift_character,
)
from .errors import BudgetExceeded, DimensionMismatch
from .instances import (
    NOISE_BIAS,
    BhmInstance,
    PromiseClass,
    classify_promise,
    density_mu,
    promise_outside_probability,
    sample_biased,
    sample_matching,
    sample_promise_instance,
    sample_T,
    sample_w,
)

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "PerfectMatching",
    "apply_matching",
    "hamming_distance",
    "lift_character",
    "BudgetExceeded",
    "DimensionMismatch",
    "NOISE_BIAS",
    "BhmInstance",
    "PromiseClass",
    "classify_promise",
    "density_mu",
    "promise_outside_probability",
    "sample_biased",
    "sample_matching",
    "sample_promise_instance",
    "sample_T",
    "sample_w",
    "__version__",
]
