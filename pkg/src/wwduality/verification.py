"""Invariant checks run by ``wwduality verify``.

Each check reports a non-negative residual; it passes when the residual does
not exceed its tolerance. Monte Carlo checks accept a tolerance override.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .hilbert import DensityOperator, MeasurementBasis, eig_hermitian, haar_unitaries, partial_trace_quanton, trace_norm_half
from .interferometer import (
    detector_state_quanton_first,
    detector_state_wwd_first,
    final_joint_state,
    quanton_probability,
    symmetric_wwd,
)
from .errors import ZeroProbabilityError
from .optimizer import ScanConfig, brute_force_reference, optimize_distinguishability, run_scan
from .whichway import (
    duality_residual,
    englert_basis,
    englert_distinguishability,
    likelihood,
    likelihood_operator,
)

FIGURE_VISIBILITIES = (0.5, 0.9, 0.97)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    monte_carlo: bool

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def natural_line_closed_form(v: float, delta: float, sigma: int) -> float:
    return 2 * (1 - v) / (2 * v * (1 + sigma * math.cos(delta)) + 2 * (1 - v))


def _grid(n: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


def wwd_first_saturation() -> float:
    return max(abs(duality_residual(englert_distinguishability(symmetric_wwd(v)), v)) for v in np.linspace(0, 1, 21))


def trace_norm_identity() -> float:
    res = 0.0
    for v in np.linspace(0, 1, 21):
        w = symmetric_wwd(v)
        res = max(res, abs(trace_norm_half(likelihood_operator(w)) - math.sqrt(1 - v * v)))
    return res


def eig_reconstruction(seed: int) -> float:
    rng = np.random.default_rng(seed)
    res = 0.0
    for _ in range(200):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = g + g.conj().T
        vals, basis = eig_hermitian(h)
        u = np.asarray(basis.vectors)
        res = max(res, np.abs((u * vals) @ u.conj().T - h).max())
    return float(res)


def partial_trace_matches_mixture() -> float:
    res = 0.0
    for v in np.linspace(0, 1, 10):
        for d in _grid(10):
            w = symmetric_wwd(v)
            rho = partial_trace_quanton(final_joint_state(w, d))
            res = max(res, np.abs(rho.entries - detector_state_wwd_first(w).entries).max())
    return float(res)


def probabilities_sum_to_one() -> float:
    return max(
        abs(quanton_probability(symmetric_wwd(v), d, 1) + quanton_probability(symmetric_wwd(v), d, -1) - 1.0)
        for v in np.linspace(0, 1, 21)
        for d in _grid(50)
    )


def mixture_identity() -> float:
    res = 0.0
    for v in np.linspace(0, 1, 10):
        w = symmetric_wwd(v)
        target = detector_state_wwd_first(w).entries
        for d in _grid(10):
            mix = np.zeros((3, 3), dtype=complex)
            for s in (1, -1):
                try:
                    ket, p = detector_state_quanton_first(w, d, s)
                except ZeroProbabilityError:
                    continue
                mix += p * np.outer(ket.amplitudes, ket.amplitudes.conj())
            res = max(res, np.abs(mix - target).max())
    return float(res)


def phase_wwd_commutation() -> float:
    return max(
        float(np.abs(final_joint_state(symmetric_wwd(v), d).amplitudes
                     - final_joint_state(symmetric_wwd(v), d, wwd_before_phase=True).amplitudes).max())
        for v in np.linspace(0, 1, 11)
        for d in _grid(16)
    )


def natural_closed_form() -> float:
    res = 0.0
    for v in FIGURE_VISIBILITIES:
        w = symmetric_wwd(v)
        for d in _grid(50):
            for s in (1, -1):
                ket, _ = detector_state_quanton_first(w, d, s)
                got = likelihood(w, MeasurementBasis.standard(3), DensityOperator.from_ket(ket)).d_value
                res = max(res, abs(got - natural_line_closed_form(v, d, s)))
    return res


def englert_anchor() -> float:
    res = 0.0
    for v in np.linspace(0, 0.99, 12):
        w = symmetric_wwd(v)
        ket, _ = detector_state_quanton_first(w, 0.0, 1)
        got = likelihood(w, englert_basis(w), DensityOperator.from_ket(ket)).d_value
        res = max(res, abs(got - math.sqrt(1 - v * v)))
    return res


def no_signal() -> float:
    p = quanton_probability(symmetric_wwd(1.0), math.pi, 1)
    try:
        detector_state_quanton_first(symmetric_wwd(1.0), math.pi, 1)
    except ZeroProbabilityError:
        return abs(p)
    return math.inf


def peak_full_distinguishability(seed: int) -> float:
    return max(
        abs(optimize_distinguishability(symmetric_wwd(v), math.pi, 1, 10_000, seed).d_opt - 1.0)
        for v in FIGURE_VISIBILITIES
    )


def duality_violation(seed: int) -> float:
    d = optimize_distinguishability(symmetric_wwd(0.9), math.pi, 1, 10_000, seed).d_opt
    return abs(duality_residual(d, 0.9) - 0.81)


def haar_orthonormality(seed: int) -> float:
    us = haar_unitaries(np.random.default_rng(seed), 1000, 3)
    gram = np.conj(np.swapaxes(us, 1, 2)) @ us
    return float(np.abs(gram - np.eye(3)).max())


def haar_mean_overlap(seed: int) -> float:
    us = haar_unitaries(np.random.default_rng(seed), 10_000, 3)
    fixed = np.array([1.0, 1.0j, -1.0]) / math.sqrt(3.0)
    return abs(float(np.mean(np.abs(us[:, :, 0] @ fixed.conj()) ** 2)) - 1.0 / 3.0)


def englert_optimality_wwd_first(seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for v in (0.25, 0.5, 0.75, 0.9):
        w = symmetric_wwd(v)
        rho = detector_state_wwd_first(w)
        d_eng = englert_distinguishability(w)
        for u in haar_unitaries(rng, 1000, 3):
            worst = max(worst, likelihood(w, MeasurementBasis(u), rho).d_value - d_eng)
    return max(0.0, worst)


def _small_scan(sigma: int, seed: int, samples: int, steps: int):
    return run_scan(ScanConfig((0.5, 0.9), steps, samples, sigma, seed))


def scan_dominance(seed: int) -> float:
    res = 0.0
    for r in _small_scan(1, seed, 2000, 10):
        res = max(res, r.d_englert_line - r.d_opt, r.d_natural_line - r.d_opt, r.d_englert_bound - 1e-6 - r.d_opt)
    return res


def sigma_symmetry(seed: int) -> float:
    steps = 10
    plus = _small_scan(1, seed, 2000, steps)
    minus = _small_scan(-1, seed + 1, 2000, steps)
    res = 0.0
    for vi in range(2):
        for di in range(steps):
            a = plus[vi * steps + di]
            b = minus[vi * steps + (di + steps // 2) % steps]
            res = max(res, abs(a.d_opt - b.d_opt))
    return res


def oracle_agreement(seed: int) -> float:
    rng = np.random.default_rng(seed)
    res = 0.0
    for _ in range(3):
        v, d = float(rng.uniform(0, 1)), float(rng.uniform(0, 2 * math.pi))
        w = symmetric_wwd(v)
        opt = optimize_distinguishability(w, d, 1, 10_000, rng).d_opt
        ref = brute_force_reference(w, d, 1, samples=200_000, seed=int(rng.integers(2**32)))
        res = max(res, abs(opt - ref))
    return res


def sample_monotonicity(seed: int) -> float:
    w = symmetric_wwd(0.9)
    d = 2 * math.pi * 22 / 50
    prev, worst = -math.inf, 0.0
    for n in (10, 100, 1000, 5000):
        cur = optimize_distinguishability(w, d, 1, n, seed, refine=False).d_opt
        worst = max(worst, prev - cur)
        prev = cur
    return worst


CHECKS: list[tuple[str, Callable[[int], float], float, bool]] = [
    ("wwd-first saturation D^2+V^2=1 (21 V)", lambda s: wwd_first_saturation(), 1e-12, False),
    ("half trace norm = sqrt(1-V^2)", lambda s: trace_norm_identity(), 1e-10, False),
    ("eigendecomposition reconstruction", eig_reconstruction, 1e-9, False),
    ("partial trace = wwd-first detector state", lambda s: partial_trace_matches_mixture(), 1e-12, False),
    ("outcome probabilities sum to 1 (50x21)", lambda s: probabilities_sum_to_one(), 1e-12, False),
    ("probability-weighted mixture identity (10x10)", lambda s: mixture_identity(), 1e-12, False),
    ("phase shifter / WWD commute", lambda s: phase_wwd_commutation(), 1e-12, False),
    ("natural-basis closed form", lambda s: natural_closed_form(), 1e-12, False),
    ("Englert basis at delta=0 gives sqrt(1-V^2)", lambda s: englert_anchor(), 1e-10, False),
    ("no signal at V=1, delta=pi, sigma=+1", lambda s: no_signal(), 1e-12, False),
    ("full distinguishability at delta=pi", peak_full_distinguishability, 1e-12, False),
    ("duality violation residual 0.81 at V=0.9", duality_violation, 1e-9, False),
    ("Haar bases orthonormal (1000 draws)", haar_orthonormality, 1e-10, False),
    ("Haar mean overlap 1/3 (10000 draws)", haar_mean_overlap, 0.02, True),
    ("Englert optimal when WWD read first", englert_optimality_wwd_first, 1e-9, True),
    ("scan dominance over reference lines", scan_dominance, 1e-12, True),
    ("sigma=-1 curve = sigma=+1 shifted by pi", sigma_symmetry, 5e-3, True),
    ("optimizer vs brute-force oracle", oracle_agreement, 5e-3, True),
    ("d_opt non-decreasing in samples", sample_monotonicity, 0.0, True),
]


def run_checks(seed: int = 42, mc_tolerance: Optional[float] = None) -> list[CheckResult]:
    results = []
    for name, fn, tol, mc in CHECKS:
        if mc and mc_tolerance is not None:
            tol = mc_tolerance
        results.append(CheckResult(name, float(fn(seed)), tol, mc))
    return results
