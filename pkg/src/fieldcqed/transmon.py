"""Transmon qubit in the truncated charge basis.

The Hamiltonian is 4 E_C (n - n_g)^2 - E_J cos(phi) restricted to charge
states N in [-n_cutoff, n_cutoff].  Energies are angular frequencies
(hbar = 1); with E_C, E_J given in 2*pi*GHz the levels come out in the
same units.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import ContractViolationError, NumericError
from .qops import Operator


class TunnelingSign(enum.Enum):
    """Sign of the charge-basis off-diagonal +-E_J/2.

    The two choices are related by the gauge |N> -> (-1)^N |N>, so spectra
    are identical; matrix-element signs are not.  PLUS is the default.
    """

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class TransmonParams:
    EC: float
    EJ: float
    ng: float = 0.0
    n_cutoff: int = 20
    sign: TunnelingSign = TunnelingSign.PLUS

    def __post_init__(self):
        if not self.EC > 0:
            raise ContractViolationError(f"EC must be positive, got {self.EC}")
        if self.EJ < 0:
            raise ContractViolationError(f"EJ must be non-negative, got {self.EJ}")
        if self.n_cutoff < 1:
            raise ContractViolationError(f"n_cutoff must be at least 1, got {self.n_cutoff}")

    @property
    def dim(self) -> int:
        return 2 * self.n_cutoff + 1


@dataclass(frozen=True)
class TransmonSolution:
    """Sorted eigenfrequencies and phase-fixed charge-basis eigenvectors."""

    levels: np.ndarray
    eigvecs: np.ndarray
    params: TransmonParams
    phase_convention: str = "largest-magnitude component real positive"

    @property
    def n_levels(self) -> int:
        return self.levels.size

    def transition(self, i: int, j: int) -> float:
        """Frequency of the i -> j transition, omega_j - omega_i."""
        return float(self.levels[j] - self.levels[i])


def charge_number_op(n_cutoff: int) -> Operator:
    """Charge operator diag(-n_cutoff, ..., +n_cutoff)."""
    return Operator(np.diag(np.arange(-n_cutoff, n_cutoff + 1, dtype=float)), hermitian=True)


def _shift_op(n_cutoff: int) -> np.ndarray:
    # S = sum_N |N><N+1|: ones on the superdiagonal
    dim = 2 * n_cutoff + 1
    return np.eye(dim, k=1)


def cos_phi_op(n_cutoff: int, sign: TunnelingSign = TunnelingSign.PLUS) -> Operator:
    """cos(phi) as a charge-basis matrix, consistent with ``sign`` so that
    -E_J cos(phi) reproduces the tunneling block of the Hamiltonian."""
    s = 1.0 if sign is TunnelingSign.PLUS else -1.0
    S = _shift_op(n_cutoff)
    return Operator(-s * (S + S.T) / 2.0, hermitian=True)


def sin_phi_op(n_cutoff: int, sign: TunnelingSign = TunnelingSign.PLUS) -> Operator:
    """sin(phi) in the charge basis.

    Chosen so that i[H, n] = -E_J sin(phi) holds as an exact matrix identity
    in the truncated basis (the charge velocity used by the semiclassical
    equations of motion).
    """
    s = 1.0 if sign is TunnelingSign.PLUS else -1.0
    S = _shift_op(n_cutoff)
    return Operator(s * (S - S.T) / 2j, hermitian=True)


def build_charge_hamiltonian(p: TransmonParams) -> Operator:
    n_vals = np.arange(-p.n_cutoff, p.n_cutoff + 1, dtype=float)
    h = np.diag(4.0 * p.EC * (n_vals - p.ng) ** 2)
    off = p.EJ / 2.0 if p.sign is TunnelingSign.PLUS else -p.EJ / 2.0
    h += off * (np.eye(p.dim, k=1) + np.eye(p.dim, k=-1))
    return Operator(h, hermitian=True)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        pivot = out[k, j]
        out[:, j] *= np.conj(pivot) / abs(pivot)
    return out


def solve(p: TransmonParams) -> TransmonSolution:
    h = build_charge_hamiltonian(p)
    try:
        evals, vecs = eigh(h.mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise NumericError(f"eigensolver failed for EC={p.EC}, EJ={p.EJ}: {exc}") from exc
    resid = np.linalg.norm(h.mat @ vecs - vecs * evals, axis=0)
    hnorm = np.linalg.norm(h.mat, 2)
    if np.any(resid > 1e-10 * max(hnorm, 1.0)):
        raise NumericError(f"eigenpair residual {resid.max():.3e} exceeds 1e-10 * ||H||")
    return TransmonSolution(levels=evals, eigvecs=_fix_phases(vecs), params=p)


def charge_matrix_element(s: TransmonSolution, i: int, j: int) -> float:
    """<i| n |j> under the fixed phase convention; symmetric in (i, j)."""
    if not (0 <= i < s.n_levels and 0 <= j < s.n_levels):
        raise IndexError(f"level indices ({i}, {j}) outside [0, {s.n_levels})")
    n_diag = np.arange(-s.params.n_cutoff, s.params.n_cutoff + 1, dtype=float)
    vi = s.eigvecs[:, i]
    vj = s.eigvecs[:, j]
    mij = np.vdot(vi, n_diag * vj)
    mji = np.vdot(vj, n_diag * vi)
    val = (mij + mji) / 2.0
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericError(f"charge matrix element has residual imaginary part {val.imag:.3e}")
    return float(val.real)


def _level_over_grid(p: TransmonParams, level: int, n_points: int) -> np.ndarray:
    vals = np.empty(n_points)
    for k, ng in enumerate(np.linspace(0.0, 1.0, n_points)):
        q = TransmonParams(p.EC, p.EJ, ng, p.n_cutoff, p.sign)
        vals[k] = solve(q).levels[level]
    return vals


def charge_dispersion(p: TransmonParams, level: int = 0) -> float:
    """Peak-to-peak variation of omega_level as n_g sweeps [0, 1].

    Starts from a 21-point uniform grid and doubles the resolution until the
    estimate moves by less than 1%.
    """
    if level < 0 or level >= p.dim:
        raise IndexError(f"level {level} outside [0, {p.dim})")
    n_points = 21
    vals = _level_over_grid(p, level, n_points)
    est = float(vals.max() - vals.min())
    while n_points < 321:
        n_points = 2 * n_points - 1
        vals = _level_over_grid(p, level, n_points)
        new = float(vals.max() - vals.min())
        done = abs(new - est) <= 0.01 * abs(new)
        est = new
        if done:
            break
    return est


def transition_dispersion(p: TransmonParams, i: int = 0, j: int = 1) -> float:
    """Peak-to-peak variation of the i -> j transition frequency over n_g."""
    n_points = 21
    lo = _level_over_grid(p, i, n_points)
    hi = _level_over_grid(p, j, n_points)
    gap = hi - lo
    est = float(gap.max() - gap.min())
    while n_points < 321:
        n_points = 2 * n_points - 1
        gap = _level_over_grid(p, j, n_points) - _level_over_grid(p, i, n_points)
        new = float(gap.max() - gap.min())
        done = abs(new - est) <= 0.01 * abs(new)
        est = new
        if done:
            break
    return est


def anharmonicity(s: TransmonSolution) -> float:
    """(omega_2 - omega_1) - (omega_1 - omega_0); negative in the transmon regime.

    Numerically exact degeneracies (within 1e-12 relative) count as a single
    level, so the E_J = 0 charge spectrum {0, 4EC, 4EC, 16EC, ...} yields 8EC
    rather than the multiplicity-weighted -4EC.
    """
    w = s.levels
    distinct = [float(w[0])]
    for x in w[1:]:
        if x - distinct[-1] > 1e-12 * max(abs(float(x)), 1.0):
            distinct.append(float(x))
        if len(distinct) == 3:
            break
    if len(distinct) < 3:
        raise ContractViolationError("anharmonicity needs at least 3 distinct levels")
    return (distinct[2] - distinct[1]) - (distinct[1] - distinct[0])
