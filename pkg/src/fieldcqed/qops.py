"""Dense operator and state primitives.

Internally hbar = 1: Hamiltonians are expressed in angular-frequency units
and time in the inverse units, so ``exp(-i H t)`` needs no extra constants.
Everything is dense complex numpy; the capacity limit below keeps runaway
tensor products from exhausting memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import (
    CapacityError,
    ContractViolationError,
    DimensionMismatchError,
    NumericError,
)

# largest dense dimension accepted by constructors and tensor products
MAX_DIM = 4096

_HERM_TOL = 1e-12
_NORM_TOL = 1e-12


def _as_complex_matrix(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError("matrix contains non-finite entries")
    return m


@dataclass(frozen=True)
class Operator:
    """A dense complex square matrix with an optional hermiticity assertion.

    Parameters
    ----------
    mat:
        Square complex matrix.
    hermitian:
        If True, the constructor verifies hermiticity and operations that
        require a hermitian operand will accept it without re-deriving the
        property.
    """

    mat: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = _as_complex_matrix(self.mat)
        if m.shape[0] > MAX_DIM:
            raise CapacityError(f"dimension {m.shape[0]} exceeds MAX_DIM={MAX_DIM}")
        if self.hermitian:
            scale = max(1.0, float(np.abs(m).max()))
            if not np.allclose(m, m.conj().T, atol=_HERM_TOL * scale, rtol=0.0):
                raise ContractViolationError("matrix marked hermitian is not hermitian")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.mat.conj().T, hermitian=self.hermitian)

    def _check_dim(self, other: "Operator"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions {self.dim} and {other.dim} differ")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_dim(other)
        return Operator(self.mat + other.mat, hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_dim(other)
        return Operator(self.mat - other.mat, hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> "Operator":
        z = complex(scalar)
        herm = self.hermitian and z.imag == 0.0
        return Operator(self.mat * z, hermitian=herm)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.mat, hermitian=self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_dim(other)
        return Operator(self.mat @ other.mat)


@dataclass(frozen=True)
class StateVector:
    """Normalized state with one label per basis vector.

    ``amps`` must have unit 2-norm within 1e-12; use :meth:`from_amplitudes`
    to normalize arbitrary data.  Labels default to ``(i,)`` tuples.
    """

    amps: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex)
        if a.ndim != 1:
            raise DimensionMismatchError("state amplitudes must be one-dimensional")
        if not np.all(np.isfinite(a)):
            raise NumericError("state contains non-finite amplitudes")
        nrm = float(np.linalg.norm(a))
        if abs(nrm - 1.0) > _NORM_TOL:
            raise ContractViolationError(f"state norm {nrm} deviates from 1 by more than {_NORM_TOL}")
        labels = self.labels
        if labels is None:
            labels = tuple((i,) for i in range(a.size))
        else:
            labels = tuple(tuple(np.atleast_1d(l)) if not isinstance(l, tuple) else l for l in labels)
            if len(labels) != a.size:
                raise DimensionMismatchError("label count does not match dimension")
        object.__setattr__(self, "amps", a)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @classmethod
    def basis_state(cls, dim: int, index: int, labels=None) -> "StateVector":
        if not 0 <= index < dim:
            raise IndexError(f"basis index {index} outside [0, {dim})")
        a = np.zeros(dim, dtype=complex)
        a[index] = 1.0
        return cls(a, labels)

    @classmethod
    def from_amplitudes(cls, amps, labels=None) -> "StateVector":
        a = np.asarray(amps, dtype=complex)
        nrm = np.linalg.norm(a)
        if nrm == 0.0:
            raise ContractViolationError("cannot normalize the zero vector")
        return cls(a / nrm, labels)


def annihilation_op(n_max: int) -> Operator:
    """Bosonic annihilation operator truncated to ``n_max`` Fock states.

    Entries a[n-1, n] = sqrt(n).  The truncated commutator [a, a^dag] is the
    identity except for -(n_max - 1) in the last diagonal slot.
    """
    if n_max < 1:
        raise DimensionMismatchError("n_max must be at least 1")
    return Operator(np.diag(np.sqrt(np.arange(1.0, n_max)), k=1))


def number_op(n_max: int) -> Operator:
    """Photon-number operator diag(0, 1, ..., n_max - 1)."""
    if n_max < 1:
        raise DimensionMismatchError("n_max must be at least 1")
    return Operator(np.diag(np.arange(n_max, dtype=float)), hermitian=True)


def tensor_product(a: Operator, b: Operator) -> Operator:
    """Kronecker product with the left factor varying slowest."""
    if a.dim * b.dim > MAX_DIM:
        raise CapacityError(f"tensor product dimension {a.dim * b.dim} exceeds MAX_DIM={MAX_DIM}")
    return Operator(np.kron(a.mat, b.mat), hermitian=a.hermitian and b.hermitian)


def commutator(a: Operator, b: Operator) -> Operator:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions {a.dim} and {b.dim} differ")
    return Operator(a.mat @ b.mat - b.mat @ a.mat)


def identity_op(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex), hermitian=True)


def _require_hermitian(h: Operator):
    if not h.hermitian:
        m = h.mat
        scale = max(1.0, float(np.abs(m).max()))
        if not np.allclose(m, m.conj().T, atol=_HERM_TOL * scale, rtol=0.0):
            raise ContractViolationError("evolution requires a hermitian generator")


def evolve_step(h: Operator, psi: StateVector, dt: float) -> StateVector:
    """Advance ``psi`` by ``exp(-i h dt)`` using a spectral decomposition.

    The generator must be hermitian; the step is unitary to machine
    precision, so the norm is preserved to well below 1e-12 per step.
    """
    if h.dim != psi.dim:
        raise DimensionMismatchError(f"operator dim {h.dim} does not match state dim {psi.dim}")
    _require_hermitian(h)
    evals, vecs = eigh(h.mat)
    out = vecs @ (np.exp(-1j * evals * dt) * (vecs.conj().T @ psi.amps))
    if not np.all(np.isfinite(out)):
        raise NumericError("evolution produced non-finite amplitudes")
    return StateVector(out / np.linalg.norm(out), psi.labels)


def expectation(op: Operator, psi: StateVector) -> complex:
    """Return <psi| op |psi>.  Real to 1e-12 when ``op`` is hermitian."""
    if op.dim != psi.dim:
        raise DimensionMismatchError(f"operator dim {op.dim} does not match state dim {psi.dim}")
    return complex(np.vdot(psi.amps, op.mat @ psi.amps))
