"""Monte Carlo search for the best WWD readout basis after the quanton was measured.

The search evaluates Haar-random bases together with two deterministic
candidates (the natural basis and the Englert basis), then polishes the
best few with Nelder-Mead on a local unitary chart. The polish can be
switched off to recover a pure random search.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidArgumentError
from .hilbert import DensityOperator, MeasurementBasis, haar_unitaries
from .interferometer import (
    QuantonOutcome,
    PhaseShift,
    WwdPair,
    ZERO_PROBABILITY,
    _outcome,
    detector_state_quanton_first,
    quanton_probability,
    symmetric_wwd,
)
from .whichway import batch_d_values, englert_basis, englert_distinguishability, likelihood

log = logging.getLogger(__name__)

CHUNK = 4096
REFINE_STARTS = 6
_EYE3 = np.eye(3, dtype=complex)


class Optimum(NamedTuple):
    d_opt: float
    best_basis: MeasurementBasis


def _generator(x: np.ndarray) -> np.ndarray:
    """Anti-Hermitian 3x3 matrix from 6 real coordinates (no diagonal: column phases are irrelevant)."""
    k = np.zeros((3, 3), dtype=complex)
    k[0, 1] = x[0] + 1j * x[1]
    k[0, 2] = x[2] + 1j * x[3]
    k[1, 2] = x[4] + 1j * x[5]
    return k - k.conj().T


def _cayley(k: np.ndarray) -> np.ndarray:
    # (1 - K/2)^-1 (1 + K/2) is unitary for anti-Hermitian K
    return np.linalg.solve(_EYE3 - 0.5 * k, _EYE3 + 0.5 * k)


class _Objective:
    """Scalar ``2L - 1`` for a single 3x3 readout unitary; hot loop of the polish."""

    def __init__(self, wwd: WwdPair, state: np.ndarray):
        self.ca = wwd.chi_a.amplitudes.conj()
        self.cb = wwd.chi_b.amplitudes.conj()
        self.cf = np.conj(state)

    def __call__(self, u: np.ndarray) -> float:
        pa = np.abs(self.ca @ u) ** 2
        pb = np.abs(self.cb @ u) ** 2
        w = np.abs(self.cf @ u) ** 2
        s = pa + pb
        total = 0.0
        for j in range(3):
            if w[j] >= 1e-14 and s[j] > 0.0:
                total += max(pa[j], pb[j]) / s[j] * w[j]
            elif w[j] >= 1e-14:
                total += 0.5 * w[j]
        return 2.0 * total - 1.0


def _polish(objective: _Objective, u0: np.ndarray, max_restarts: int = 6) -> tuple[float, np.ndarray]:
    u, best = u0, objective(u0)
    simplex = np.vstack([np.zeros(6), 0.1 * np.eye(6)])
    for _ in range(max_restarts):
        res = minimize(
            lambda x: -objective(u @ _cayley(_generator(x))),
            np.zeros(6),
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-14, "maxfev": 4000},
        )
        if -res.fun <= best + 1e-13:
            break
        u = u @ _cayley(_generator(res.x))
        best = objective(u)
    return best, u


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def optimize_distinguishability(
    wwd: WwdPair,
    ps,
    out,
    samples: int = 10_000,
    rng=None,
    *,
    refine: bool = True,
) -> Optimum:
    """Best distinguishability found over readout bases for the quanton-first detector state.

    Parameters
    ----------
    wwd, ps, out
        Detector pair, phase shift and observed quanton port.
    samples
        Number of Haar-random bases. Draws are nested: the first ``n`` bases
        are the same for any ``samples >= n``.
    rng
        ``numpy.random.Generator`` or anything ``default_rng`` accepts.
    refine
        Polish the natural basis, the Englert basis and the best random
        bases with Nelder-Mead.

    Raises
    ------
    ZeroProbabilityError
        If the quanton outcome has (numerically) zero probability.
    """
    if samples < 0:
        raise InvalidArgumentError(f"samples must be >= 0, got {samples}")
    ket, _ = detector_state_quanton_first(wwd, ps, out)
    rho = DensityOperator.from_ket(ket)
    rng = _as_rng(rng)

    candidates = [MeasurementBasis.standard(3), englert_basis(wwd)]
    best_d, best_u = -math.inf, None
    for basis in candidates:
        d = likelihood(wwd, basis, rho).d_value
        if d > best_d:
            best_d, best_u = d, np.asarray(basis.vectors)

    top_d: list[float] = []
    top_u: list[np.ndarray] = []
    done = 0
    while done < samples:
        n = min(CHUNK, samples - done)
        us = haar_unitaries(rng, n, 3)
        ds = batch_d_values(wwd, ket.amplitudes, us)
        order = np.argsort(-ds, kind="stable")[:REFINE_STARTS]
        top_d.extend(ds[order].tolist())
        top_u.extend(us[order])
        done += n
    if top_d:
        order = np.argsort(-np.asarray(top_d), kind="stable")[:REFINE_STARTS]
        top_d = [top_d[i] for i in order]
        top_u = [top_u[i] for i in order]
        if top_d[0] > best_d:
            best_d, best_u = top_d[0], top_u[0]

    if refine:
        objective = _Objective(wwd, ket.amplitudes)
        starts = [np.asarray(b.vectors) for b in candidates] + top_u
        for u0 in starts:
            d, u = _polish(objective, u0)
            if d > best_d:
                best_d, best_u = d, u
    return Optimum(best_d, MeasurementBasis(best_u))


def brute_force_reference(
    wwd: WwdPair,
    ps,
    out,
    *,
    samples: int = 1_000_000,
    seed: int = 0x5EED,
    starts: int = 4,
    batch: int = 48,
    min_step: float = 1e-8,
) -> float:
    """Independent estimate of the optimal distinguishability.

    Dense Haar search followed by a batched stochastic hill climb with a
    shrinking step around the best few samples. Shares no code path with
    :func:`optimize_distinguishability` beyond basis sampling; meant as a
    test oracle.
    """
    ket, _ = detector_state_quanton_first(wwd, ps, out)
    state = ket.amplitudes
    rng = np.random.default_rng(seed)

    pool_d = np.empty(0)
    pool_u = np.empty((0, 3, 3), dtype=complex)
    done = 0
    while done < samples:
        n = min(65536, samples - done)
        us = haar_unitaries(rng, n, 3)
        ds = batch_d_values(wwd, state, us)
        keep = np.argsort(-ds)[:starts]
        pool_d = np.concatenate([pool_d, ds[keep]])
        pool_u = np.concatenate([pool_u, us[keep]])
        done += n
    keep = np.argsort(-pool_d)[:starts]

    eye = np.eye(3, dtype=complex)
    best_overall = -math.inf
    for d, u in zip(pool_d[keep], pool_u[keep]):
        step = 0.3
        for _ in range(5000):
            if step < min_step:
                break
            g = rng.standard_normal((batch, 3, 3)) + 1j * rng.standard_normal((batch, 3, 3))
            k = 0.5 * step * (g - np.conj(np.swapaxes(g, 1, 2)))
            trial = u @ np.linalg.solve(eye - 0.5 * k, eye + 0.5 * k)
            tds = batch_d_values(wwd, state, trial)
            i = int(np.argmax(tds))
            if tds[i] > d:
                d, u = tds[i], trial[i]
            else:
                step *= 0.5
        best_overall = max(best_overall, float(d))
    return best_overall


@dataclass(frozen=True)
class ScanConfig:
    visibilities: tuple[float, ...] = (0.5, 0.9, 0.97)
    delta_steps: int = 50
    samples: int = 10_000
    sigma: QuantonOutcome = QuantonOutcome.A
    master_seed: int = 42
    refine: bool = True

    def __post_init__(self):
        object.__setattr__(self, "visibilities", tuple(float(v) for v in self.visibilities))
        object.__setattr__(self, "sigma", _outcome(self.sigma))
        for v in self.visibilities:
            if not 0.0 <= v <= 1.0:
                raise InvalidArgumentError(f"visibility must lie in [0, 1], got {v!r}")
        if not self.visibilities:
            raise InvalidArgumentError("need at least one visibility")
        if self.delta_steps < 1:
            raise InvalidArgumentError(f"delta_steps must be positive, got {self.delta_steps}")
        if self.samples < 1:
            raise InvalidArgumentError(f"samples must be positive, got {self.samples}")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.master_seed}")

    def deltas(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.delta_steps) / self.delta_steps


@dataclass(frozen=True)
class ScanRecord:
    """One (delta, V, sigma) cell. The d-fields are ``None`` when the outcome has no signal."""

    delta: float
    visibility: float
    sigma: int
    outcome_probability: float
    d_opt: Optional[float]
    d_englert_line: Optional[float]
    d_natural_line: Optional[float]
    d_englert_bound: float


def cell_seed(master_seed: int, v_index: int, d_index: int) -> np.random.SeedSequence:
    """Independent random substream for one scan cell."""
    return np.random.SeedSequence(master_seed, spawn_key=(v_index, d_index))


def evaluate_cell(
    visibility: float,
    delta: float,
    sigma,
    samples: int,
    rng=None,
    *,
    refine: bool = True,
) -> ScanRecord:
    wwd = symmetric_wwd(visibility)
    ps = PhaseShift(delta)
    sigma = _outcome(sigma)
    prob = quanton_probability(wwd, ps, sigma)
    bound = englert_distinguishability(wwd)
    if prob < ZERO_PROBABILITY:
        return ScanRecord(float(delta), visibility, int(sigma), prob, None, None, None, bound)
    ket, _ = detector_state_quanton_first(wwd, ps, sigma)
    rho = DensityOperator.from_ket(ket)
    d_eng = likelihood(wwd, englert_basis(wwd), rho).d_value
    d_nat = likelihood(wwd, MeasurementBasis.standard(3), rho).d_value
    d_opt = optimize_distinguishability(wwd, ps, sigma, samples, rng, refine=refine).d_opt
    return ScanRecord(float(delta), visibility, int(sigma), prob, d_opt, d_eng, d_nat, bound)


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    n = int(threads)
    if n < 1:
        raise InvalidArgumentError(f"threads must be >= 1 or 'auto', got {threads!r}")
    return n


def run_scan(config: ScanConfig, threads=1) -> list[ScanRecord]:
    """Evaluate every (visibility, delta) cell; rows ordered by visibility index, then delta index.

    Each cell draws from its own substream of ``master_seed``, so the output
    does not depend on ``threads``.
    """
    deltas = config.deltas()
    cells = [(vi, v, di, d) for vi, v in enumerate(config.visibilities) for di, d in enumerate(deltas)]

    def work(cell):
        vi, v, di, d = cell
        rng = np.random.default_rng(cell_seed(config.master_seed, vi, di))
        return evaluate_cell(v, d, config.sigma, config.samples, rng, refine=config.refine)

    n = resolve_threads(threads)
    log.info("scanning %d cells on %d thread(s)", len(cells), n)
    if n == 1:
        return [work(c) for c in cells]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(work, cells))
