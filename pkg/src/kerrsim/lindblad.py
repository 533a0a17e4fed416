"""Dense truncated-Fock-space master equation: the brute-force reference.

Everything here favors being obviously correct over being fast: dense
matrices, direct linear solves, fixed-step RK4.  Dimensions stay small
(<= ~60), so the vectorized generator is at most a few thousand squared.

Hamiltonian convention: H = delta*n + chi2*adag^2 a^2 + i(conj(E) a - E adag),
dissipator gamma*D[a]; its field equation of motion coincides with
model.eom_rhs at mean-field level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from .errors import CutoffTooSmall, DimensionTooSmall, TraceDrift, VacuumG2Undefined
from .model import KerrParams

__all__ = [
    "FockDensityMatrix",
    "destroy",
    "hamiltonian",
    "build_liouvillian",
    "steady_state",
    "expectations",
    "evolve_master",
    "coherent_dm",
    "fock_dm",
    "thermal_dm",
    "fidelity_with_pure",
]


@dataclass
class FockDensityMatrix:
    """Density matrix on the lowest `dim` Fock states."""

    dim: int
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        if self.rho.shape != (self.dim, self.dim):
            raise ValueError(f"rho shape {self.rho.shape} != ({self.dim}, {self.dim})")

    def validate(self, herm_tol=1e-10, trace_tol=1e-10, eig_tol=-1e-8):
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        if herm > herm_tol:
            raise ValueError(f"not Hermitian: max asymmetry {herm:.3e}")
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} not 1")
        evals = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))
        if evals.min() < eig_tol:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")
        return self

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def hamiltonian(p: KerrParams, dim: int) -> np.ndarray:
    a = destroy(dim)
    ad = a.conj().T
    num = ad @ a
    h = p.delta * num + p.chi2 * (ad @ ad @ a @ a)
    h = h + 1j * (np.conj(p.drive) * a - p.drive * ad)
    return h


def build_liouvillian(p: KerrParams, dim: int) -> np.ndarray:
    """Vectorized generator L with L @ vec(rho) = vec(drho/dt).

    Column-major (Fortran) vec convention: vec(A X B) = (B^T kron A) vec(X).
    """
    if dim < 2:
        raise DimensionTooSmall(f"dim must be >= 2, got {dim}")
    a = destroy(dim)
    ad = a.conj().T
    num = ad @ a
    h = hamiltonian(p, dim)
    eye = np.eye(dim)
    liou = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    liou += p.gamma * (
        np.kron(a.conj(), a)
        - 0.5 * np.kron(eye, num)
        - 0.5 * np.kron(num.T, eye)
    )
    return liou


def steady_state(p: KerrParams, dim: int, tail_sites: int = 5, tail_tol: float = 1e-8) -> FockDensityMatrix:
    """Null vector of the generator under the trace constraint.

    One row of the generator is replaced by the trace functional; the
    populations of the top `tail_sites` levels must sum below `tail_tol`,
    otherwise the cutoff is declared too small for these parameters.
    """
    liou = build_liouvillian(p, dim)
    trace_row = np.zeros(dim * dim, dtype=complex)
    trace_row[np.arange(dim) * (dim + 1)] = 1.0
    liou[0, :] = trace_row
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1.0
    vec = scipy.linalg.solve(liou, rhs)
    rho = vec.reshape((dim, dim), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    tail = float(np.sum(np.real(np.diag(rho))[dim - tail_sites:]))
    if tail > tail_tol:
        raise CutoffTooSmall(
            f"top {tail_sites} populations sum to {tail:.3e} > {tail_tol:.1e}; raise dim"
        )
    return FockDensityMatrix(dim=dim, rho=rho)


def expectations(state: FockDensityMatrix) -> tuple[complex, float, float]:
    """(mean field <a>, occupation <n>, g2(0)) of a density matrix."""
    a = destroy(state.dim)
    ad = a.conj().T
    mean_a = complex(np.trace(state.rho @ a))
    n = float(np.real(np.trace(state.rho @ ad @ a)))
    if n < 1e-12:
        raise VacuumG2Undefined(f"<n> = {n:.3e} too small for g2(0)")
    g2 = float(np.real(np.trace(state.rho @ ad @ ad @ a @ a))) / n**2
    return mean_a, n, g2


def _lindblad_rhs(rho: np.ndarray, h: np.ndarray, a: np.ndarray, ad: np.ndarray,
                  num: np.ndarray, gamma: float) -> np.ndarray:
    comm = h @ rho - rho @ h
    diss = a @ rho @ ad - 0.5 * (num @ rho + rho @ num)
    return -1j * comm + gamma * diss


def evolve_master(
    rho0: FockDensityMatrix,
    p: KerrParams,
    dt: float,
    t_end: float,
) -> tuple[np.ndarray, list[FockDensityMatrix]]:
    """Fixed-step RK4 integration of the master equation.

    Returns (times, states) sampled at every step including t=0.  Raises
    TraceDrift if |tr rho - 1| ever exceeds 1e-6 (step size too large).
    """
    dim = rho0.dim
    a = destroy(dim)
    ad = a.conj().T
    num = ad @ a
    h = hamiltonian(p, dim)
    n_steps = int(round(t_end / dt))
    rho = rho0.rho.copy()
    states = [FockDensityMatrix(dim=dim, rho=rho.copy())]
    for k in range(n_steps):
        k1 = _lindblad_rhs(rho, h, a, ad, num, p.gamma)
        k2 = _lindblad_rhs(rho + 0.5 * dt * k1, h, a, ad, num, p.gamma)
        k3 = _lindblad_rhs(rho + 0.5 * dt * k2, h, a, ad, num, p.gamma)
        k4 = _lindblad_rhs(rho + dt * k3, h, a, ad, num, p.gamma)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(np.trace(rho) - 1.0)
        if drift > 1e-6:
            raise TraceDrift(f"trace drifted by {drift:.3e} at step {k + 1}")
        states.append(FockDensityMatrix(dim=dim, rho=rho.copy()))
    times = np.arange(n_steps + 1) * dt
    return times, states


def coherent_state_vector(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent state, normalized within the cutoff."""
    ks = np.arange(dim)
    log_mag = ks * np.log(np.abs(alpha) + 1e-300) - 0.5 * scipy.special.gammaln(ks + 1)
    vec = np.exp(log_mag - 0.5 * abs(alpha) ** 2) * np.exp(1j * ks * np.angle(alpha))
    if abs(alpha) == 0:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        return vec
    return vec / np.linalg.norm(vec)


def coherent_dm(alpha: complex, dim: int) -> FockDensityMatrix:
    vec = coherent_state_vector(alpha, dim)
    return FockDensityMatrix(dim=dim, rho=np.outer(vec, vec.conj()))


def fock_dm(k: int, dim: int) -> FockDensityMatrix:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[k, k] = 1.0
    return FockDensityMatrix(dim=dim, rho=rho)


def thermal_dm(nbar: float, dim: int) -> FockDensityMatrix:
    ks = np.arange(dim)
    pops = (nbar / (1.0 + nbar)) ** ks / (1.0 + nbar)
    pops /= pops.sum()
    return FockDensityMatrix(dim=dim, rho=np.diag(pops).astype(complex))


def fidelity_with_pure(state: FockDensityMatrix, vec: np.ndarray) -> float:
    """<psi| rho |psi> for a pure reference state."""
    return float(np.real(vec.conj() @ state.rho @ vec))
