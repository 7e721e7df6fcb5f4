"""Which-way likelihood and distinguishability."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompleteBasisError, InvalidArgumentError, UndefinedOutcomeError
from .hilbert import DensityOperator, Ket, MeasurementBasis, Operator, eig_hermitian, inner
from .interferometer import WwdPair, quanton_probability

ZERO_WEIGHT = 1e-14
COMPLETENESS_ATOL = 1e-10


@dataclass(frozen=True)
class LikelihoodReport:
    """Per-outcome guessing chances and readout weights for one basis.

    ``per_outcome`` holds ``(L_j, weight_j)`` for outcomes with non-negligible
    weight only.
    """

    per_outcome: tuple[tuple[float, float], ...]
    total_L: float

    @property
    def d_value(self) -> float:
        return 2.0 * self.total_L - 1.0


def visibility(wwd: WwdPair) -> float:
    return abs(wwd.alpha_a.conjugate() * wwd.alpha_b)


def estimate_visibility_from_pattern(wwd: WwdPair, grid_size: int = 256) -> float:
    """Fringe contrast ``(P_max - P_min) / (P_max + P_min)`` of P_a over a uniform phase grid."""
    if grid_size < 8:
        raise InvalidArgumentError(f"grid_size must be >= 8, got {grid_size}")
    deltas = 2.0 * math.pi * np.arange(grid_size) / grid_size
    p = np.array([quanton_probability(wwd, d, +1) for d in deltas])
    hi, lo = p.max(), p.min()
    return float((hi - lo) / (hi + lo))


def outcome_likelihood(wwd: WwdPair, outcome_vec: Ket) -> float:
    """Chance of guessing the path correctly given the detector was found in ``outcome_vec``."""
    pa = abs(inner(wwd.chi_a, outcome_vec)) ** 2
    pb = abs(inner(wwd.chi_b, outcome_vec)) ** 2
    if pa + pb <= ZERO_WEIGHT:
        raise UndefinedOutcomeError("readout vector is orthogonal to both detector states")
    return max(pa, pb) / (pa + pb)


def likelihood(wwd: WwdPair, basis: MeasurementBasis, detector: DensityOperator) -> LikelihoodReport:
    """Weighted guessing chance for reading out ``detector`` in ``basis``.

    Outcomes whose readout weight is below 1e-14 are skipped: their guessing
    chance is 0/0 and contributes nothing.
    """
    if basis.dim != detector.dim:
        raise InvalidArgumentError(f"basis dim {basis.dim} != detector dim {detector.dim}")
    rows = []
    for vec in basis:
        w = detector.expectation(vec).real
        if w < ZERO_WEIGHT:
            continue
        rows.append((outcome_likelihood(wwd, vec), w))
    total_w = sum(w for _, w in rows)
    if abs(total_w - 1.0) > COMPLETENESS_ATOL:
        raise IncompleteBasisError(f"readout weights sum to {total_w!r}, basis does not span the state")
    return LikelihoodReport(tuple(rows), sum(l * w for l, w in rows))


def likelihood_operator(wwd: WwdPair) -> Operator:
    """``|chi_a><chi_a| - |chi_b><chi_b|``."""
    return wwd.chi_a.projector() - wwd.chi_b.projector()


def englert_basis(wwd: WwdPair) -> MeasurementBasis:
    """Eigenbasis of ``|chi_a><chi_a| - |chi_b><chi_b|``, eigenvalues descending.

    When that operator vanishes (identical detector states) every basis is an
    eigenbasis and the natural basis is returned.
    """
    vals, vecs = eig_hermitian(likelihood_operator(wwd))
    if np.abs(vals).max() < 1e-12:
        return MeasurementBasis.standard(3)
    return vecs


def englert_distinguishability(wwd: WwdPair) -> float:
    """``sqrt(1 - |<chi_a|chi_b>|^2)``, optimal when the WWD is read out first.

    Evaluated as half the trace norm of ``|chi_a><chi_a| - |chi_b><chi_b|``
    with the small factor written in the natural basis, which avoids the
    cancellation in ``1 - V^2`` as V -> 1.
    """
    ov = abs(wwd.alpha_a.conjugate() * wwd.alpha_b)
    small = (abs(wwd.alpha_a) - abs(wwd.alpha_b)) ** 2 + abs(wwd.beta_a) ** 2 + abs(wwd.beta_b) ** 2
    large = wwd.chi_a.norm_squared + wwd.chi_b.norm_squared + 2.0 * ov
    return 0.5 * math.sqrt(small * large)


def duality_residual(d: float, v: float) -> float:
    """``d^2 + v^2 - 1``; positive values break the duality bound."""
    return d * d + v * v - 1.0


def batch_d_values(wwd: WwdPair, state: np.ndarray, unitaries: np.ndarray) -> np.ndarray:
    """``2L - 1`` of a pure detector state for a stack of readout bases.

    ``unitaries`` has shape ``(n, 3, 3)`` with basis vectors as columns.
    Vectorized twin of :func:`likelihood`; zero-weight outcomes drop out the
    same way.
    """
    u = np.asarray(unitaries)
    ov_a = np.abs(np.einsum("i,nij->nj", wwd.chi_a.amplitudes.conj(), u)) ** 2
    ov_b = np.abs(np.einsum("i,nij->nj", wwd.chi_b.amplitudes.conj(), u)) ** 2
    w = np.abs(np.einsum("i,nij->nj", np.conj(state), u)) ** 2
    s = ov_a + ov_b
    lj = np.divide(np.maximum(ov_a, ov_b), s, out=np.full_like(s, 0.5), where=s > 0.0)
    return 2.0 * np.where(w >= ZERO_WEIGHT, lj * w, 0.0).sum(axis=1) - 1.0
