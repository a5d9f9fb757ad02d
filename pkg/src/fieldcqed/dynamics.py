"""Time evolution: exact unitary propagation of finite Hamiltonians,
symplectic classical transmon trajectories, and the Ehrenfest identity
check connecting the two pictures."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    NumericError,
    StepSizeError,
)
from .qops import Operator, StateVector
from .transmon import (
    TransmonParams,
    build_charge_hamiltonian,
    charge_number_op,
    sin_phi_op,
)

# populations per basis label are recorded automatically up to this dimension
_POPULATION_DIM_LIMIT = 64


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus named real observable series of equal length."""

    times: np.ndarray
    series: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ContractViolationError("need a 1D time grid with at least 2 points")
        if np.any(np.diff(t) <= 0):
            raise ContractViolationError("time grid must be strictly ascending")
        for name, s in self.series.items():
            if np.asarray(s).shape != t.shape:
                raise DimensionMismatchError(f"series {name!r} length does not match times")
        object.__setattr__(self, "times", t)

    @property
    def names(self):
        return sorted(self.series)


@dataclass(frozen=True)
class ClassicalState:
    """Conjugate pair: Josephson phase (rad) and pair-number imbalance."""

    phi: float
    n: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.n)):
            raise ContractViolationError("classical state must be finite")


def _as_matrix(h) -> np.ndarray:
    if isinstance(h, Operator):
        return h.mat
    matrix = getattr(h, "matrix", None)
    if isinstance(matrix, Operator):
        return matrix.mat
    raise ContractViolationError("expected an Operator or an object with a .matrix Operator")


def evolve(h, psi0: StateVector, t_grid, observables: dict = None) -> Trajectory:
    """Unitary evolution of ``psi0`` under ``h`` sampled on ``t_grid``.

    Uses one spectral decomposition, so every sample is the exact propagator
    applied to the initial state: refining the grid never changes values at
    shared times.  Records norm, energy and (for small systems) populations
    per basis label, plus expectations of any extra ``observables``.
    """
    mat = _as_matrix(h)
    if mat.shape[0] != psi0.dim:
        raise DimensionMismatchError(f"H dim {mat.shape[0]} does not match state dim {psi0.dim}")
    scale = max(1.0, float(np.abs(mat).max()))
    if not np.allclose(mat, mat.conj().T, atol=1e-12 * scale, rtol=0.0):
        raise ContractViolationError("evolution requires a hermitian Hamiltonian")
    t = np.asarray(t_grid, dtype=float)

    evals, vecs = eigh(mat)
    c0 = vecs.conj().T @ psi0.amps
    states = vecs @ (np.exp(-1j * np.outer(evals, t)) * c0[:, None])
    if not np.all(np.isfinite(states.view(float))):
        raise NumericError("evolution produced non-finite amplitudes")

    series = {
        "norm": np.linalg.norm(states, axis=0),
        "energy": np.einsum("it,ij,jt->t", states.conj(), mat, states).real,
    }
    if psi0.dim <= _POPULATION_DIM_LIMIT:
        for idx, label in enumerate(psi0.labels):
            key = "pop_" + "_".join(str(x) for x in label)
            series[key] = np.abs(states[idx, :]) ** 2
    for name, op in (observables or {}).items():
        if op.dim != psi0.dim:
            raise DimensionMismatchError(f"observable {name!r} dimension mismatch")
        series[name] = np.einsum("it,ij,jt->t", states.conj(), op.mat, states).real
    return Trajectory(times=t, series=series, metadata={"dim": psi0.dim})


def _uniform_dt(t: np.ndarray) -> float:
    dt = np.diff(t)
    if dt.size == 0 or abs(dt.max() - dt.min()) > 1e-9 * dt.mean():
        raise ContractViolationError("classical integration needs a uniform time grid")
    return float(dt.mean())


def classical_trajectory(p: TransmonParams, s0: ClassicalState, t_grid) -> Trajectory:
    """Leapfrog integration of the classical phase/charge pair.

    dphi/dt = 8 E_C (n - n_g), dn/dt = -E_J sin(phi).  The kick-drift-kick
    update is symplectic: the energy error stays bounded and oscillatory
    instead of drifting.  A drift beyond 1% of the initial energy scale
    raises StepSizeError.
    """
    t = np.asarray(t_grid, dtype=float)
    dt = _uniform_dt(t)
    n_steps = t.size - 1
    ec8 = 8.0 * p.EC
    phi = np.empty(t.size)
    n = np.empty(t.size)
    energy = np.empty(t.size)
    f, v = float(s0.phi), float(s0.n)
    phi[0], n[0] = f, v
    energy[0] = 4.0 * p.EC * (v - p.ng) ** 2 - p.EJ * math.cos(f)
    sin, cos = math.sin, math.cos
    half = 0.5 * dt
    ej = p.EJ
    ng = p.ng
    for k in range(1, n_steps + 1):
        v -= ej * sin(f) * half
        f += ec8 * (v - ng) * dt
        v -= ej * sin(f) * half
        if not -1e150 < f < 1e150:
            raise StepSizeError(f"trajectory diverged at step {k}; reduce dt")
        phi[k], n[k] = f, v
        energy[k] = 4.0 * p.EC * (v - ng) ** 2 - ej * cos(f)
    e0 = energy[0]
    e_scale = abs(e0) if abs(e0) > 1e-12 * (p.EJ + 4 * p.EC) else (p.EJ + 4 * p.EC)
    worst = float(np.max(np.abs(energy - e0)))
    if worst > 0.01 * e_scale:
        raise StepSizeError(
            f"energy drift {worst:.3e} exceeds 1% of the initial scale {e_scale:.3e}; reduce dt")
    return Trajectory(
        times=t,
        series={"phi": phi, "n": n, "energy": energy},
        metadata={"dt": dt, "max_energy_error": worst, "energy_scale": e_scale},
    )


def ehrenfest_check(p: TransmonParams, psi0: StateVector, t_grid) -> float:
    """Residual of d<n>/dt = -E_J <sin phi> for an isolated transmon.

    The derivative is a centered finite difference on the supplied grid, so
    the residual itself converges at second order in the grid spacing.
    Returns max_t |d<n>/dt + E_J <sin phi>| normalized by the larger of
    max|E_J <sin phi>| and 1e-3 E_J (the floor keeps eigenstate runs, where
    both sides vanish, from dividing noise by noise).
    """
    h = build_charge_hamiltonian(p)
    t = np.asarray(t_grid, dtype=float)
    dt = _uniform_dt(t)
    traj = evolve(h, psi0, t, observables={
        "n_expect": charge_number_op(p.n_cutoff),
        "sin_phi": sin_phi_op(p.n_cutoff, p.sign),
    })
    evals = np.linalg.eigvalsh(h.mat)
    spread = float(evals[-1] - evals[0])
    if dt * spread > 0.5:
        warnings.warn(
            "t_grid too coarse for the finite-difference derivative; "
            f"dt * spectral_spread = {dt * spread:.2f}", stacklevel=2)
    n_t = traj.series["n_expect"]
    rhs = -p.EJ * traj.series["sin_phi"]
    lhs = (n_t[2:] - n_t[:-2]) / (2.0 * dt)
    resid = np.max(np.abs(lhs - rhs[1:-1]))
    denom = max(float(np.max(np.abs(rhs))), 1e-3 * p.EJ)
    return float(resid / denom)


def first_return_period(times: np.ndarray, series: np.ndarray, threshold: float = 0.9) -> float:
    """Time of the first interior local maximum exceeding ``threshold``.

    A parabola through the three samples around the maximum refines the
    estimate, so the grid does not need to resolve the peak exactly.  Used
    for oscillations that start at their maximum (period = first return).
    """
    t = np.asarray(times, dtype=float)
    s = np.asarray(series, dtype=float)
    fell = False
    for k in range(1, t.size - 1):
        if s[k] < threshold:
            fell = True
            continue
        if fell and s[k] >= s[k - 1] and s[k] >= s[k + 1]:
            denom = s[k - 1] - 2.0 * s[k] + s[k + 1]
            if denom == 0.0:
                return float(t[k])
            shift = 0.5 * (s[k - 1] - s[k + 1]) / denom
            return float(t[k] + shift * (t[k + 1] - t[k]))
    raise NumericError("no return maximum found in the sampled window")
