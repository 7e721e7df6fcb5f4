"""Small fixed-dimension complex linear algebra.

Kets, operators and measurement bases are thin immutable wrappers around
numpy arrays. The heavy lifting (QR, Hermitian eigensolver) is delegated to
numpy; this module adds the validation and conventions the rest of the
package relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidArgumentError

HERMITIAN_ATOL = 1e-12
ORTHONORMAL_ATOL = 1e-10
NORM_ATOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Complex amplitude vector over a finite orthonormal basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidArgumentError(f"ket needs a non-empty 1-d amplitude array, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self) -> "Ket":
        n2 = self.norm_squared
        if n2 == 0.0:
            raise InvalidArgumentError("cannot normalize the zero vector")
        return Ket(self.amplitudes / np.sqrt(n2))

    def projector(self) -> "Operator":
        return Operator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"Ket({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix acting on a ket space."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgumentError(f"operator must be square, got shape {m.shape}")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0.0, atol=atol))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def expectation(self, ket: Ket) -> complex:
        return complex(np.vdot(ket.amplitudes, self.entries @ ket.amplitudes))

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.entries - other.entries)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.entries * scalar)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


class DensityOperator(Operator):
    """Hermitian, positive semi-definite, unit-trace operator."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_hermitian():
            raise InvalidArgumentError("density operator must be Hermitian")
        tr = np.trace(self.entries).real
        if abs(tr - 1.0) > 1e-10:
            raise InvalidArgumentError(f"density operator must have unit trace, got {tr!r}")
        if np.linalg.eigvalsh(self.entries).min() < -1e-10:
            raise InvalidArgumentError("density operator must be positive semi-definite")

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityOperator":
        psi = ket.normalize().amplitudes
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal readout vectors, stored as the columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[1] > v.shape[0] or v.shape[1] == 0:
            raise InvalidArgumentError(f"basis needs a (dim, n<=dim) column array, got shape {v.shape}")
        gram = v.conj().T @ v
        if not np.allclose(gram, np.eye(v.shape[1]), rtol=0.0, atol=ORTHONORMAL_ATOL):
            raise InvalidArgumentError("basis vectors are not orthonormal")
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def from_kets(cls, kets: Iterable[Ket]) -> "MeasurementBasis":
        kets = list(kets)
        dims = {k.dim for k in kets}
        if len(dims) != 1:
            raise InvalidArgumentError("basis kets must share one dimension")
        return cls(np.column_stack([k.amplitudes for k in kets]))

    @classmethod
    def standard(cls, dim: int) -> "MeasurementBasis":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, j: int) -> Ket:
        return Ket(self.vectors[:, j])

    def __iter__(self):
        return (Ket(self.vectors[:, j]) for j in range(len(self)))

    def gram(self) -> np.ndarray:
        return self.vectors.conj().T @ self.vectors


def inner(a: Ket, b: Ket) -> complex:
    """``<a|b>``, conjugating the first argument."""
    if a.dim != b.dim:
        raise InvalidArgumentError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _as_hermitian(m: Operator | np.ndarray) -> np.ndarray:
    op = m if isinstance(m, Operator) else Operator(m)
    if not op.is_hermitian():
        raise InvalidArgumentError("operator is not Hermitian")
    return np.asarray(op.entries)


def eig_hermitian(m: Operator | np.ndarray) -> tuple[np.ndarray, MeasurementBasis]:
    """Eigenvalues in descending order and the matching orthonormal eigenvectors.

    Degenerate eigenspaces get whatever orthonormal completion LAPACK
    returns; this is deterministic for a given input.
    """
    h = _as_hermitian(m)
    # symmetrize away sub-tolerance anti-Hermitian noise before LAPACK sees it
    vals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    order = np.argsort(vals)[::-1]
    return vals[order], MeasurementBasis(vecs[:, order])


def trace_norm_half(m: Operator | np.ndarray) -> float:
    """Half the trace norm, i.e. half the sum of absolute eigenvalues."""
    h = _as_hermitian(m)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (h + h.conj().T))).sum())


def partial_trace_quanton(joint: Ket, quanton_dim: int = 2) -> DensityOperator:
    """Reduced detector state of a quanton-major joint ket.

    Amplitude index ``q * d + k`` addresses quanton state ``q`` and detector
    state ``k``, where ``d = joint.dim // quanton_dim``.
    """
    if joint.dim % quanton_dim:
        raise InvalidArgumentError(f"joint dimension {joint.dim} not divisible by {quanton_dim}")
    if abs(joint.norm_squared - 1.0) > NORM_ATOL:
        raise InvalidArgumentError(f"joint ket is not normalized (norm^2 = {joint.norm_squared!r})")
    psi = joint.amplitudes.reshape(quanton_dim, -1)
    return DensityOperator(np.einsum("qi,qj->ij", psi, psi.conj()))


def haar_unitaries(rng: np.random.Generator, count: int, dim: int = 3) -> np.ndarray:
    """``count`` Haar-distributed ``dim x dim`` unitaries, shape ``(count, dim, dim)``.

    Ginibre matrix -> QR -> rephase columns by the phases of diag(R). Draws
    are made sample-major, so the first ``n`` unitaries for a given generator
    state do not depend on ``count``.
    """
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
    g = rng.standard_normal((count, dim, dim, 2))
    z = (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def haar_random_basis(rng: np.random.Generator, dim: int) -> MeasurementBasis:
    """One Haar-random orthonormal basis of ``C^dim``."""
    return MeasurementBasis(haar_unitaries(rng, 1, dim)[0])


def natural_basis_kets() -> tuple[Ket, Ket, Ket]:
    """``|0>``, ``|+>``, ``|->`` as detector-space kets."""
    return Ket.basis(3, 0), Ket.basis(3, 1), Ket.basis(3, 2)
