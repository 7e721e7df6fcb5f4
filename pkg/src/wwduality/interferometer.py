"""Two-way interferometer with a which-way detector (WWD).

The quanton lives in a 2-dim path space {|psi_a>, |psi_b>}, the detector in
the 3-dim natural basis {|0>, |+>, |->}. Joint kets are quanton-major:
amplitude index ``3*q + k``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, ZeroProbabilityError
from .hilbert import DensityOperator, Ket

TWO_PI = 2.0 * math.pi
ZERO_PROBABILITY = 1e-14

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class WwdPair:
    """Conditional detector states in the natural basis.

    ``|chi_a> = alpha_a|0> + beta_a|+>`` and ``|chi_b> = alpha_b|0> + beta_b|->``.
    """

    alpha_a: complex
    beta_a: complex
    alpha_b: complex
    beta_b: complex

    def __post_init__(self):
        for name in ("alpha_a", "beta_a", "alpha_b", "beta_b"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for label, (al, be) in (("a", (self.alpha_a, self.beta_a)), ("b", (self.alpha_b, self.beta_b))):
            n2 = abs(al) ** 2 + abs(be) ** 2
            if abs(n2 - 1.0) > 1e-12:
                raise InvalidArgumentError(f"|chi_{label}> not normalized: norm^2 = {n2!r}")

    @property
    def chi_a(self) -> Ket:
        return Ket([self.alpha_a, self.beta_a, 0.0])

    @property
    def chi_b(self) -> Ket:
        return Ket([self.alpha_b, 0.0, self.beta_b])


@dataclass(frozen=True)
class PhaseShift:
    """Interferometric phase in radians, reduced to [0, 2pi)."""

    delta: float

    def __post_init__(self):
        d = float(self.delta)
        if not math.isfinite(d):
            raise InvalidArgumentError(f"phase must be finite, got {d!r}")
        d = math.fmod(d, TWO_PI)
        if d < 0.0:
            d += TWO_PI
        if d >= TWO_PI:  # fmod of a tiny negative can round up to 2pi
            d = 0.0
        object.__setattr__(self, "delta", d)

    @property
    def phasor(self) -> complex:
        return complex(math.cos(self.delta), math.sin(self.delta))


class QuantonOutcome(enum.IntEnum):
    """Output port found when the quanton is read out: +1 for |psi_a>, -1 for |psi_b>."""

    A = 1
    B = -1

    @classmethod
    def parse(cls, value) -> "QuantonOutcome":
        if isinstance(value, str):
            value = value.strip()
            value = {"a": 1, "+": 1, "b": -1, "-": -1}.get(value.lower(), value)
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"quanton outcome must be +1 or -1, got {value!r}") from None


def _phase(ps) -> PhaseShift:
    return ps if isinstance(ps, PhaseShift) else PhaseShift(ps)


def _outcome(out) -> QuantonOutcome:
    return out if isinstance(out, QuantonOutcome) else QuantonOutcome.parse(out)


def symmetric_wwd(visibility: float) -> WwdPair:
    """Symmetric detector pair with ``|<chi_a|chi_b>| = visibility``.

    All amplitudes are real and non-negative: alphas ``sqrt(V)``, betas
    ``sqrt(1 - V)``.
    """
    v = float(visibility)
    if not 0.0 <= v <= 1.0:
        raise InvalidArgumentError(f"visibility must lie in [0, 1], got {visibility!r}")
    a, b = math.sqrt(v), math.sqrt(1.0 - v)
    return WwdPair(a, b, a, b)


# -- pipeline stages on explicit state vectors ---------------------------------

def beam_splitter(quanton: np.ndarray) -> np.ndarray:
    """Balanced splitter/merger acting on the quanton factor of a 2- or 6-dim vector."""
    q = np.asarray(quanton, dtype=complex)
    if q.shape == (2,):
        return HADAMARD @ q
    return (HADAMARD @ q.reshape(2, -1)).reshape(-1)


def phase_shifter(state: np.ndarray, ps) -> np.ndarray:
    """Multiply the |psi_b> branch by ``exp(i delta)``."""
    s = np.array(state, dtype=complex).reshape(2, -1)
    s[1] *= _phase(ps).phasor
    return s.reshape(-1) if s.shape[1] > 1 else s[:, 0]


def which_way_interaction(quanton: np.ndarray, wwd: WwdPair) -> np.ndarray:
    """Entangle a quanton state with the detector: ``|psi_q>|chi_i> -> |psi_q>|chi_q>``.

    The quanton amplitudes are untouched; only the detector records the path.
    """
    q = np.asarray(quanton, dtype=complex)
    if q.shape != (2,):
        raise InvalidArgumentError("which-way interaction acts on a bare 2-dim quanton state")
    return np.concatenate([q[0] * wwd.chi_a.amplitudes, q[1] * wwd.chi_b.amplitudes])


def final_joint_state(wwd: WwdPair, ps, *, wwd_before_phase: bool = False) -> Ket:
    """Joint quanton-detector ket after splitter, phase/WWD stage and merger.

    Proportional to ``|psi_a>(|chi_a> + e^{i delta}|chi_b>) + |psi_b>(|chi_a> - e^{i delta}|chi_b>)``.
    The WWD and phase shifter commute; ``wwd_before_phase`` selects the order.
    """
    ps = _phase(ps)
    q = beam_splitter(np.array([1.0, 0.0], dtype=complex))
    if wwd_before_phase:
        joint = phase_shifter(which_way_interaction(q, wwd), ps)
    else:
        joint = which_way_interaction(phase_shifter(q, ps), wwd)
    return Ket(beam_splitter(joint))


def _unnormalized_detector(wwd: WwdPair, ps: PhaseShift, out: QuantonOutcome) -> np.ndarray:
    # natural-basis form: (alpha_a + s e^{id} alpha_b)|0> + beta_a|+> + s e^{id} beta_b|->
    z = int(out) * ps.phasor
    return np.array([wwd.alpha_a + z * wwd.alpha_b, wwd.beta_a, z * wwd.beta_b], dtype=complex)


def _probability(wwd: WwdPair, ps: PhaseShift, out: QuantonOutcome) -> float:
    # closed form rather than a norm: exact at V = 0 and at the no-signal point
    overlap = wwd.alpha_a.conjugate() * wwd.alpha_b
    return 0.5 * (1.0 + int(out) * (ps.phasor * overlap).real)


def quanton_probability(wwd: WwdPair, ps, out) -> float:
    """Probability of finding the quanton at output ``out``.

    Equals ``(1 + sigma Re(e^{i delta} <chi_a|chi_b>)) / 2``.
    """
    return _probability(wwd, _phase(ps), _outcome(out))


def detector_state_wwd_first(wwd: WwdPair) -> DensityOperator:
    """Detector state when it is read out before the quanton: equal mixture of chi_a, chi_b."""
    return DensityOperator(0.5 * (wwd.chi_a.projector().entries + wwd.chi_b.projector().entries))


def detector_state_quanton_first(wwd: WwdPair, ps, out) -> tuple[Ket, float]:
    """Normalized detector ket after the quanton was found at ``out``, with that outcome's probability.

    Raises
    ------
    ZeroProbabilityError
        If the outcome probability is below 1e-14 (no signal, projection undefined).
    """
    ps, out = _phase(ps), _outcome(out)
    prob = _probability(wwd, ps, out)
    if prob < ZERO_PROBABILITY:
        raise ZeroProbabilityError(
            f"outcome sigma={int(out):+d} has probability {prob:.3g} at delta={ps.delta!r}"
        )
    return Ket(_unnormalized_detector(wwd, ps, out)).normalize(), prob
