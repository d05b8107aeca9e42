"""Numerical verification suite over every module's identities.

Each check returns a :class:`CheckResult` with the worst observed gap
(or z-score) so failures are diagnosable from the report alone.  The CLI
aggregates these into a pass/fail report with a nonzero exit status on
any failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import classical, combinatorics, fourier, instances, quantum
from .core import BitString, PerfectMatching, apply_matching, lift_character
from .seeding import substream


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_gap: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {"check": self.name, "passed": self.passed}
        if self.max_gap is not None:
            record["max_gap"] = self.max_gap
        record.update(self.details)
        return record


def _random_matching(n: int, rng: np.random.Generator) -> PerfectMatching:
    return instances.sample_matching(n, rng)


# ---------------------------------------------------------------------------
# core identities


def check_core_identities(seed: int, max_points: int = 8) -> CheckResult:
    """Edge-parity product vs explicit GF(2) matrix, adjointness, lift weight."""
    failures = 0
    cases = 0
    for n in range(1, max_points // 2 + 1):
        for pairs in combinatorics.enumerate_matchings(2 * n):
            matching = PerfectMatching(pairs)
            mat = matching.matrix()
            for x_idx in range(1 << (2 * n)):
                x = BitString.from_index(2 * n, x_idx)
                direct = apply_matching(matching, x).to_array()
                via_matrix = (mat @ x.to_array()) % 2
                failures += not np.array_equal(direct, via_matrix)
                cases += 1
            for s_idx in range(1 << n):
                s = BitString.from_index(n, s_idx)
                lifted = lift_character(matching, s)
                failures += lifted.hamming_weight() != 2 * s.hamming_weight()
                for x_idx in range(1 << (2 * n)):
                    x = BitString.from_index(2 * n, x_idx)
                    lhs = sum(
                        a * b for a, b in zip(apply_matching(matching, x).bits, s.bits)
                    ) % 2
                    rhs = sum(a * b for a, b in zip(x.bits, lifted.bits)) % 2
                    failures += lhs != rhs
                    cases += 1
    # spot-check a large size with random inputs
    rng = substream(seed, 0)
    for case in range(20):
        n = 16
        matching = _random_matching(n, rng)
        x = BitString.from_array(rng.integers(0, 2, size=2 * n))
        via_matrix = (matching.matrix() @ x.to_array()) % 2
        failures += not np.array_equal(apply_matching(matching, x).to_array(), via_matrix)
        cases += 1
    return CheckResult("core_identities", failures == 0, details={"cases": cases})


# ---------------------------------------------------------------------------
# fourier identities


def _random_table(m: int, rng: np.random.Generator) -> fourier.CubeFunction:
    return fourier.CubeFunction(m=m, values=rng.uniform(-1.0, 1.0, size=1 << m))


def check_fourier_roundtrip(m: int, cases: int, seed: int) -> CheckResult:
    worst = 0.0
    for case in range(cases):
        rng = substream(seed, 1, case)
        f = _random_table(m, rng)
        back = fourier.inverse_transform(fourier.transform(f))
        worst = max(worst, float(np.max(np.abs(back.values - f.values))))
    return CheckResult("fourier_roundtrip", worst <= 1e-12, max_gap=worst)


def check_parseval(m: int, cases: int, seed: int, tol: float = 1e-9) -> CheckResult:
    worst = 0.0
    for case in range(cases):
        rng = substream(seed, 2, case)
        lhs, rhs, gap = fourier.check_parseval(_random_table(m, rng))
        worst = max(worst, gap / max(1.0, abs(lhs), abs(rhs)))
    return CheckResult("parseval", worst <= tol, max_gap=worst)


def check_convolution(
    m: int,
    cases: int,
    seed: int,
    tol: float = 1e-9,
    spectral_scale: float | None = None,
) -> CheckResult:
    """Direct XOR convolution against the spectral route.

    ``spectral_scale`` overrides the diagonalization factor; the suite
    must fail when it is wrong, which the mutation test exercises.
    """
    worst = 0.0
    for case in range(cases):
        rng = substream(seed, 3, case)
        f = _random_table(m, rng)
        g = _random_table(m, rng)
        direct = fourier.convolve(f, g)
        spectral = fourier.convolve_spectral(f, g, scale=spectral_scale)
        scale = max(1.0, float(np.max(np.abs(direct.values))))
        worst = max(worst, float(np.max(np.abs(direct.values - spectral.values))) / scale)
    return CheckResult("convolution_theorem", worst <= tol, max_gap=worst)


def check_l1_l2(m: int, cases: int, seed: int) -> CheckResult:
    ok = all(
        fourier.check_l1_l2(_random_table(m, substream(seed, 4, case)))
        for case in range(cases)
    )
    return CheckResult("l1_l2_relation", ok)


def check_kkl(max_m: int, cases: int, seed: int) -> CheckResult:
    """Sparse sign functions across the full delta sweep; any violation fails."""
    deltas = [round(0.1 * i, 1) for i in range(11)]
    violations = 0
    worst = -math.inf
    for case in range(cases):
        rng = substream(seed, 5, case)
        m = int(rng.integers(1, max_m + 1))
        density = rng.uniform(0.05, 1.0)
        vals = rng.choice([-1.0, 0.0, 1.0], size=1 << m, p=[density / 2, 1 - density, density / 2])
        f = fourier.CubeFunction(m=m, values=vals)
        for delta in deltas:
            lhs, rhs, holds = fourier.check_kkl(f, delta)
            violations += not holds
            worst = max(worst, lhs - rhs)
    return CheckResult(
        "kkl_inequality",
        violations == 0,
        max_gap=worst,
        details={"cases": cases, "deltas": len(deltas)},
    )


def check_closed_form_spectrum(max_n: int = 12) -> CheckResult:
    worst = 0.0
    for n in range(1, max_n + 1):
        spectrum = fourier.transform(fourier.mu_difference(n))
        gap = np.max(np.abs(spectrum.coefficients - fourier.closed_form_spectrum_table(n)))
        worst = max(worst, float(gap))
    return CheckResult("closed_form_spectrum", worst <= 1e-12, max_gap=worst)


def check_lift_identity(cases: int, seed: int, max_points: int = 12) -> CheckResult:
    worst = 0.0
    for case in range(cases):
        rng = substream(seed, 6, case)
        n = int(rng.integers(2, max_points // 2 + 1))
        matching = _random_matching(n, rng)
        size = 1 << (2 * n)
        count = int(rng.integers(1, size + 1))
        picks = rng.choice(size, size=count, replace=False)
        A = [BitString.from_index(2 * n, int(i)) for i in picks]
        worst = max(worst, fourier.check_lift_identity(A, matching))
    return CheckResult("lift_identity", worst <= 1e-12, max_gap=worst)


# ---------------------------------------------------------------------------
# quantum protocol


def check_measurement_probabilities(seed: int, ns: tuple[int, ...] = (2, 4, 8)) -> CheckResult:
    """Outcome probabilities sum to 1 and vanish on the wrong-parity sign."""
    worst = 0.0
    ok = True
    for i, n in enumerate(ns):
        rng = substream(seed, 7, i)
        for case in range(20):
            x = BitString.from_array(rng.integers(0, 2, size=2 * n))
            matching = _random_matching(n, rng)
            probs = quantum.outcome_probabilities(quantum.prepare_state(x), matching)
            worst = max(worst, abs(float(probs.sum()) - 1.0))
            parities = apply_matching(matching, x)
            for e in range(n):
                live = probs[2 * e] if parities.bits[e] == 0 else probs[2 * e + 1]
                dead = probs[2 * e + 1] if parities.bits[e] == 0 else probs[2 * e]
                ok &= abs(live - 1.0 / n) <= 1e-12 and abs(dead) <= 1e-12
    return CheckResult("measurement_probabilities", ok and worst <= 1e-12, max_gap=worst)


def check_projector_vs_analytic(
    seed: int, ns: tuple[int, ...] = (2, 4, 8), shots: int = 100_000
) -> CheckResult:
    """Both measurement paths match the exact outcome distribution per cell."""
    worst_z = 0.0
    for i, n in enumerate(ns):
        rng = substream(seed, 8, i)
        x = BitString.from_array(rng.integers(0, 2, size=2 * n))
        matching = _random_matching(n, rng)
        state = quantum.prepare_state(x)
        exact = quantum.outcome_probabilities(state, matching)
        counts = {"projector": np.zeros(2 * n), "analytic": np.zeros(2 * n)}
        for method, hist in counts.items():
            for _ in range(shots):
                out = quantum.measure_matching_basis(state, matching, rng, method=method)
                slot = 2 * (out.edge_index - 1) + (0 if out.sign > 0 else 1)
                hist[slot] += 1
        for hist in counts.values():
            freq = hist / shots
            sigma = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / shots)
            worst_z = max(worst_z, float(np.max(np.abs(freq - exact) / sigma)))
            if float(freq[exact == 0.0].sum()) != 0.0:
                return CheckResult("projector_vs_analytic", False, max_gap=math.inf)
    return CheckResult(
        "projector_vs_analytic", worst_z <= 4.5, max_gap=worst_z, details={"unit": "z"}
    )


def check_quantum_mc_grid(seed: int, shots: int = 20_000) -> CheckResult:
    """Empirical single-shot success against the exact oracle on an (n, d) grid."""
    worst_z = 0.0
    case = 0
    for n in (8, 32, 64):
        for d_frac in (0.0, 0.25, 0.5):
            d = int(round(d_frac * n))
            inst = _pinned_instance(n, d, source=0, seed=substream(seed, 9, case))
            case += 1
            p = float(quantum.exact_success(inst))
            rng = substream(seed, 9, 100 + case)
            p_hat = quantum.empirical_success(inst, shots, rng)
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / shots)
            worst_z = max(worst_z, abs(p_hat - p) / sigma)
    return CheckResult("quantum_mc_vs_exact", worst_z <= 4.0, max_gap=worst_z, details={"unit": "z"})


def _pinned_instance(
    n: int, d: int, source: int, seed: np.random.Generator
) -> instances.BhmInstance:
    """Instance with an exact disagreement count d, random otherwise."""
    x = BitString.from_array(seed.integers(0, 2, size=2 * n))
    matching = _random_matching(n, seed)
    parities = apply_matching(matching, x)
    flip = np.zeros(n, dtype=np.uint8)
    flip[seed.choice(n, size=d, replace=False)] = 1
    w = BitString.from_array(parities.to_array() ^ flip)
    return instances.BhmInstance(x=x, matching=matching, w=w, source=source)


def check_amplification(
    seed: int, rs: tuple[int, ...] = (1, 3, 5, 9, 15), trials: int = 20_000
) -> CheckResult:
    """Majority-vote MC against the exact binomial tail at single-shot 2/3."""
    inst = instances.BhmInstance(
        x=BitString.zeros(6),
        matching=PerfectMatching(((1, 2), (3, 4), (5, 6))),
        w=BitString.from_text("100"),
        source=0,
    )
    assert quantum.exact_success(inst) == Fraction(2, 3)
    worst_z = 0.0
    previous = Fraction(0)
    monotone = True
    for i, r in enumerate(rs):
        exact = quantum.exact_success(inst, r)
        monotone &= exact >= previous
        previous = exact
        rng = substream(seed, 10, i)
        hits = sum(
            quantum.run_repeated(inst, r, rng).guess == inst.source for _ in range(trials)
        )
        p = float(exact)
        sigma = math.sqrt(p * (1 - p) / trials)
        worst_z = max(worst_z, abs(hits / trials - p) / sigma)
    return CheckResult(
        "amplification", monotone and worst_z <= 4.0, max_gap=worst_z, details={"unit": "z"}
    )


# ---------------------------------------------------------------------------
# combinatorics


def check_matching_counts(max_t: int = 10) -> CheckResult:
    ok = all(
        combinatorics.count_matchings(t) == len(combinatorics.enumerate_matchings(t))
        for t in range(2, max_t + 1, 2)
    )
    return CheckResult("matching_counts", ok)


def check_gamma(
    seed: int,
    grid: tuple[int, ...] = (4, 8, 16),
    max_k: int = 8,
    mc_trials: int = 20_000,
) -> CheckResult:
    """Exact value vs bound, MC agreement, support independence, root bound."""
    worst_z = 0.0
    ok = True
    case = 0
    for n in grid:
        for k in range(2, min(max_k, 2 * n) + 1, 2):
            gamma = combinatorics.gamma_exact(n, k)
            bound = Fraction(k, 2 * n) ** (k // 2)
            ok &= gamma <= bound
            ok &= combinatorics.gamma_exact(n, 2) == Fraction(1, 2 * n - 1)
            delta = float(gamma) ** (1.0 / k)
            ok &= k / (4 * delta) >= math.sqrt(2 * n * k) / 4 - 1e-12
            ok &= math.sqrt(2 * n * k) / 4 >= math.sqrt(n) / 2 - 1e-12
            rng = substream(seed, 11, case)
            est = combinatorics.gamma_monte_carlo(n, k, mc_trials, rng)
            sigma = max(est.sigma, math.sqrt(float(gamma) * (1 - float(gamma)) / mc_trials), 1e-9)
            worst_z = max(worst_z, abs(est.estimate - float(gamma)) / sigma)
            case += 1
    # support independence at one representative cell
    rng = substream(seed, 11, 1000)
    n, k = 8, 4
    z_bits = np.zeros(2 * n, dtype=np.uint8)
    z_bits[rng.choice(2 * n, size=k, replace=False)] = 1
    est_a = combinatorics.gamma_monte_carlo(n, k, mc_trials, substream(seed, 11, 1001))
    est_b = combinatorics.gamma_monte_carlo(
        n, k, mc_trials, substream(seed, 11, 1002), z=BitString.from_array(z_bits)
    )
    pooled = math.sqrt(est_a.sigma**2 + est_b.sigma**2)
    worst_z = max(worst_z, abs(est_a.estimate - est_b.estimate) / max(pooled, 1e-9))
    return CheckResult("gamma", ok and worst_z <= 4.0, max_gap=worst_z, details={"unit": "z"})


# ---------------------------------------------------------------------------
# instances


def check_density_normalization(max_n: int = 10) -> CheckResult:
    ok = True
    for n in range(1, max_n + 1):
        for b in (0, 1):
            total = sum(
                instances.density_mu(b, BitString.from_index(n, i)) for i in range(1 << n)
            )
            ok &= total == 1
    return CheckResult("density_normalization", ok)


def check_promise_rates(
    seed: int, ns: tuple[int, ...] = (50, 100), trials: int = 10_000
) -> CheckResult:
    """Empirical outside-rate against the exact binomial tail; decreasing in n."""
    worst_z = 0.0
    rates = []
    for i, n in enumerate(ns):
        exact = float(instances.promise_outside_probability(n))
        outside = 0
        for t in range(trials):
            rng = substream(seed, 12, i, t)
            inst = instances.sample_T(n, rng)
            outside += instances.classify_promise(inst) is instances.PromiseClass.OUTSIDE
        rate = outside / trials
        rates.append(rate)
        sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / trials)
        worst_z = max(worst_z, abs(rate - exact) / sigma)
    decreasing = all(a > b for a, b in zip(rates, rates[1:]))
    return CheckResult(
        "promise_rates",
        worst_z <= 4.0 and decreasing,
        max_gap=worst_z,
        details={"unit": "z", "rates": rates},
    )


# ---------------------------------------------------------------------------
# classical protocols


def check_subset_oracle(
    seed: int, n: int = 32, subset_size: int = 12, trials: int = 20_000
) -> CheckResult:
    """Per-known-edge-count success against the exact vote oracle."""
    subset = range(1, subset_size + 1)
    ks, correct = classical.subset_trial_outcomes(n, subset, trials, seed)
    worst_z = 0.0
    for k in np.unique(ks):
        sel = ks == k
        count = int(sel.sum())
        if count < 200:
            continue
        p = float(classical.known_edge_success(int(k)))
        sigma = math.sqrt(max(p * (1 - p), 1e-12) / count)
        worst_z = max(worst_z, abs(float(correct[sel].mean()) - p) / sigma)
    return CheckResult("subset_oracle", worst_z <= 4.0, max_gap=worst_z, details={"unit": "z"})


def check_classical_exact(seed: int) -> CheckResult:
    """Hand-checkable exact values and brute-force dominance at n = 2."""
    n = 2
    ok = classical.bayes_success(classical.alice_constant(n), n, 0) == Fraction(1, 2)
    ok &= classical.bayes_success(classical.alice_parity(n), n, 1) == Fraction(1, 2)
    ok &= classical.bayes_success(classical.alice_identity(n), n, 4) == Fraction(3, 4)
    best = classical.bruteforce_optimal(n, 1)
    assert best.success_exact is not None
    for heuristic in (
        classical.alice_parity(n),
        classical.alice_dictator(n, 1),
        classical.alice_dictator(n, 3),
    ):
        ok &= classical.bayes_success(heuristic, n, 1) <= best.success_exact
    chain = [(), (1,), (1, 2), (1, 2, 3), (1, 2, 3, 4)]
    values = [classical.subset_success_exact(n, s) for s in chain]
    ok &= all(a <= b for a, b in zip(values, values[1:]))
    return CheckResult("classical_exact", bool(ok))


# ---------------------------------------------------------------------------
# suite runner


FOURIER_CHECKS = (
    "fourier_roundtrip",
    "parseval",
    "convolution_theorem",
    "l1_l2_relation",
    "kkl_inequality",
    "closed_form_spectrum",
    "lift_identity",
)


def run_fourier_suite(m: int, cases: int, seed: int) -> list[CheckResult]:
    return [
        check_fourier_roundtrip(m, cases, seed),
        check_parseval(m, cases, seed),
        check_convolution(m, cases, seed),
        check_l1_l2(m, cases, seed),
        check_kkl(min(m, 10), cases, seed),
        check_closed_form_spectrum(),
        check_lift_identity(min(cases, 100), seed),
    ]


def run_all(
    seed: int, m: int = 8, cases: int = 50, trials: int = 20_000
) -> list[CheckResult]:
    """Every module's property suite at configurable sizes."""
    results = [check_core_identities(seed)]
    results.extend(run_fourier_suite(m, cases, seed))
    results.extend(
        [
            check_measurement_probabilities(seed),
            check_projector_vs_analytic(seed, shots=max(trials, 10_000)),
            check_quantum_mc_grid(seed, shots=trials),
            check_amplification(seed, trials=trials),
            check_matching_counts(),
            check_gamma(seed, mc_trials=trials),
            check_density_normalization(),
            check_promise_rates(seed, trials=min(trials, 10_000)),
            check_subset_oracle(seed, trials=trials),
            check_classical_exact(seed),
        ]
    )
    return results
