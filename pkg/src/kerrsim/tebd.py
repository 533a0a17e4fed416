"""Tensor-network real-time evolution of the oscillator + bath chain.

The state is a matrix product state in Gamma/lambda (canonical) form over
one system site followed by the chain sites.  Evolution uses second-order
Suzuki-Trotter sweeps of two-site gates: half a step over the odd-pair
set (which contains the system bond), a full step over the even-pair set,
then the second odd half.  Every two-site application contracts the pair,
applies the gate, and splits back by SVD with a hard bond-dimension cap
plus a relative weight floor; the discarded weight is logged, never
silently absorbed.

Local operators applied between evolutions (for two-time correlators)
modify only the site tensor; the stored Schmidt vectors then refer to the
unperturbed state, which makes the subsequent truncations slightly
suboptimal but leaves the representation exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from .chain_map import ChainCoefficients
from .errors import CutoffTooSmall, StationarityViolated, SvdFailure
from .lindblad import FockDensityMatrix, destroy
from .model import InitialState, KerrParams
from .semiclassical import TrajectoryRecord
from .spectra import CorrelatorSet

__all__ = [
    "MatrixProductState",
    "GateSet",
    "TruncationReport",
    "init_state",
    "build_gates",
    "step",
    "evolve",
    "reduced_density_matrix",
    "two_time_correlation",
    "collect_correlators",
    "save_checkpoint",
    "load_checkpoint",
]

_WEIGHT_FLOOR = 1e-12  # relative Schmidt weight below which values are dropped


@dataclass
class TruncationReport:
    """Error accounting for one evolution run."""

    per_step_discarded: list = field(default_factory=list)
    cumulative_discarded: float = 0.0
    max_bond_dim: int = 1
    canonical_residual: float = 0.0
    norm_drift_max: float = 0.0

    def add_step(self, discarded: float, max_chi: int, norm_drift: float = 0.0):
        self.per_step_discarded.append(discarded)
        self.cumulative_discarded += discarded
        self.max_bond_dim = max(self.max_bond_dim, max_chi)
        self.norm_drift_max = max(self.norm_drift_max, norm_drift)


class MatrixProductState:
    """Gamma/lambda tensor train over the system site plus chain sites.

    gammas[i] has shape (chi_left, local_dims[i], chi_right); lambdas has
    one vector per bond including the trivial boundary bonds, so
    len(lambdas) == n_sites + 1 and lambdas[0] == lambdas[-1] == [1.0].
    """

    def __init__(self, local_dims, gammas, lambdas, chi_max: int):
        self.local_dims = list(local_dims)
        self.gammas = gammas
        self.lambdas = lambdas
        self.chi_max = int(chi_max)
        if len(gammas) != len(self.local_dims) or len(lambdas) != len(gammas) + 1:
            raise ValueError("inconsistent tensor-train lengths")

    @property
    def n_sites(self) -> int:
        return len(self.gammas)

    @classmethod
    def product_state(cls, vectors, chi_max: int) -> "MatrixProductState":
        gammas = [np.asarray(v, dtype=complex).reshape(1, -1, 1) for v in vectors]
        lambdas = [np.array([1.0]) for _ in range(len(gammas) + 1)]
        return cls([g.shape[1] for g in gammas], gammas, lambdas, chi_max)

    def copy(self) -> "MatrixProductState":
        return MatrixProductState(
            list(self.local_dims),
            [g.copy() for g in self.gammas],
            [l.copy() for l in self.lambdas],
            self.chi_max,
        )

    def bond_dims(self) -> list:
        return [l.size for l in self.lambdas]

    # -- contraction helpers -------------------------------------------------

    def _right_tensor(self, i: int) -> np.ndarray:
        """Gamma_i with the right bond weights absorbed."""
        return self.gammas[i] * self.lambdas[i + 1][None, None, :]

    def _right_environment(self, stop_site: int) -> np.ndarray:
        """Transfer contraction of sites stop_site..end; returns (chi, chi)."""
        dim = self.lambdas[-1].size
        env = np.eye(dim, dtype=complex)
        for i in range(self.n_sites - 1, stop_site - 1, -1):
            m = self._right_tensor(i)
            tmp = np.tensordot(m, env, axes=(2, 0))        # (a, s, b')
            env = np.tensordot(tmp, m.conj(), axes=([1, 2], [1, 2]))  # (a, a')
        return env

    def _left_environment(self, stop_site: int) -> np.ndarray:
        """Transfer contraction of sites 0..stop_site-1 including lambda_0."""
        dim = self.lambdas[0].size
        env = np.diag(self.lambdas[0] ** 2).astype(complex)
        for i in range(stop_site):
            m = self._right_tensor(i)
            tmp = np.tensordot(env, m, axes=(0, 0))        # (a', s, b)
            env = np.tensordot(m.conj(), tmp, axes=([0, 1], [0, 1]))  # (b', b)
            env = env.T
        return env

    def norm_squared(self) -> float:
        return float(np.real(self._right_environment(0)[0, 0]))

    def rho_site(self, site: int = 0) -> np.ndarray:
        """Exact reduced density matrix of one site (not renormalized)."""
        left = self._left_environment(site)
        right = self._right_environment(site + 1)
        m = self._right_tensor(site)
        tmp = np.tensordot(left, m, axes=(0, 0))           # (a', s, b)
        tmp = np.tensordot(tmp, right, axes=(2, 0))        # (a', s, b')
        rho = np.tensordot(tmp, m.conj(), axes=([0, 2], [0, 2]))  # (s, s')
        return rho

    def site_expectation(self, op: np.ndarray, site: int = 0) -> complex:
        rho = self.rho_site(site)
        return complex(np.trace(op @ rho) / max(np.real(np.trace(rho)), 1e-300))

    def apply_site_operator(self, op: np.ndarray, site: int = 0) -> float:
        """Apply a (not necessarily unitary) operator in place.

        The state is rescaled back to unit norm; the removed scale factor is
        returned so correlators can reinstate it.
        """
        self.gammas[site] = np.einsum("st,atb->asb", op, self.gammas[site])
        scale = math.sqrt(max(self.norm_squared(), 0.0))
        if scale == 0.0:
            return 0.0
        self.gammas[site] /= scale
        return scale

    def schmidt_spectra_descending(self) -> bool:
        return all(np.all(np.diff(l) <= 1e-14) for l in self.lambdas)

    def canonical_residual(self) -> float:
        """Max deviation of the canonical-form isometry conditions."""
        worst = 0.0
        for i in range(self.n_sites):
            a = self.lambdas[i][:, None, None] * self.gammas[i]
            left = np.tensordot(a.conj(), a, axes=([0, 1], [0, 1]))
            worst = max(worst, float(np.max(np.abs(left - np.eye(left.shape[0])))))
            b = self._right_tensor(i)
            right = np.tensordot(b, b.conj(), axes=([1, 2], [1, 2]))
            worst = max(worst, float(np.max(np.abs(right - np.eye(right.shape[0])))))
        return worst


def init_state(
    p: KerrParams,
    a0,
    dims: tuple,
    n_chain: int,
    chi_max: int = 16,
    tail_tol: float = 1e-6,
) -> MatrixProductState:
    """Product state: truncated coherent field on the system, chain in vacuum.

    The coherent amplitude left outside the system cutoff must stay below
    `tail_tol` in norm, otherwise CutoffTooSmall tells the caller to raise
    the system dimension.
    """
    sys_dim, chain_dim = dims
    if sys_dim < 2:
        raise ValueError(f"system dimension must be >= 2, got {sys_dim}")
    alpha = a0.alpha if isinstance(a0, InitialState) else complex(a0)

    if abs(alpha) == 0:
        vec = np.zeros(sys_dim, dtype=complex)
        vec[0] = 1.0
    else:
        ks = np.arange(sys_dim)
        log_pop = 2.0 * ks * np.log(abs(alpha)) - scipy.special.gammaln(ks + 1)
        pops = np.exp(log_pop - abs(alpha) ** 2)
        tail_sq = max(1.0 - pops.sum(), 0.0)
        if math.sqrt(tail_sq) >= tail_tol:
            raise CutoffTooSmall(
                f"coherent tail norm {math.sqrt(tail_sq):.3e} >= {tail_tol:.1e} "
                f"for |alpha|={abs(alpha):.3g} at system dim {sys_dim}"
            )
        vec = np.exp(0.5 * log_pop - 0.5 * abs(alpha) ** 2) * np.exp(1j * ks * np.angle(alpha))
        vec = vec / np.linalg.norm(vec)

    vacuum = np.zeros(chain_dim, dtype=complex)
    vacuum[0] = 1.0
    vectors = [vec] + [vacuum] * n_chain
    return MatrixProductState.product_state(vectors, chi_max)


@dataclass
class GateSet:
    """Two-site unitaries for one Trotter step.

    odd_gates act on bonds 0, 2, 4, ... (the set containing the system
    bond), even_gates on bonds 1, 3, 5, ...; half_step_odd are the odd
    gates for dt/2.  Each gate is stored as (bond, tensor(dL, dR, dL, dR)).
    """

    dt: float
    odd_gates: list
    even_gates: list
    half_step_odd: list


def _bond_hamiltonian(p, coeffs, dims, bond, n_bonds):
    sys_dim, chain_dim = dims
    b_op = destroy(chain_dim)
    bd_op = b_op.conj().T
    num_b = bd_op @ b_op
    if bond == 0:
        a_op = destroy(sys_dim)
        ad_op = a_op.conj().T
        ks = np.arange(sys_dim, dtype=float)
        h_sys = np.diag(p.delta * ks + p.chi2 * ks * (ks - 1.0)).astype(complex)
        h_sys += 1j * (np.conj(p.drive) * a_op - p.drive * ad_op)
        h = np.kron(h_sys, np.eye(chain_dim))
        h += coeffs.eta_prime * (np.kron(ad_op, b_op) + np.kron(a_op, bd_op))
        # right site (first chain oscillator) shares its on-site term
        w_right = 1.0 if n_bonds == 1 else 0.5
        h += w_right * coeffs.omegas[0] * np.kron(np.eye(sys_dim), num_b)
        return h
    eta = coeffs.etas[bond - 1]
    h = eta * (np.kron(bd_op, b_op) + np.kron(b_op, bd_op))
    w_left = 0.5  # chain site `bond` always has a bond on each side
    w_right = 1.0 if bond == n_bonds - 1 else 0.5
    h += w_left * coeffs.omegas[bond - 1] * np.kron(num_b, np.eye(chain_dim))
    h += w_right * coeffs.omegas[bond] * np.kron(np.eye(chain_dim), num_b)
    return h


def build_gates(p: KerrParams, coeffs: ChainCoefficients, dt: float, dims: tuple) -> GateSet:
    """Exponentiated bond Hamiltonians for one second-order Trotter step.

    The system bond carries the full oscillator Hamiltonian (detuning,
    anharmonicity, drive) plus the system-chain hopping; chain bonds carry
    their hopping; on-site chain terms are split half-half onto adjacent
    bonds with boundary sites taking the full share (they all vanish for
    this bath, whose chain frequencies are zero).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    sys_dim, chain_dim = dims
    n_bonds = coeffs.n_sites
    odd, even, half_odd = [], [], []
    for bond in range(n_bonds):
        h = _bond_hamiltonian(p, coeffs, dims, bond, n_bonds)
        d_left = sys_dim if bond == 0 else chain_dim
        shape = (d_left, chain_dim, d_left, chain_dim)
        gate_full = scipy.linalg.expm(-1j * dt * h).reshape(shape)
        if bond % 2 == 0:
            odd.append((bond, gate_full))
            half_odd.append((bond, scipy.linalg.expm(-0.5j * dt * h).reshape(shape)))
        else:
            even.append((bond, gate_full))
    return GateSet(dt=dt, odd_gates=odd, even_gates=even, half_step_odd=half_odd)


def _svd_with_fallback(mat: np.ndarray):
    try:
        return scipy.linalg.svd(mat, full_matrices=False, check_finite=False)
    except np.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(mat, full_matrices=False, check_finite=False,
                                lapack_driver="gesvd")
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"SVD failed on a {mat.shape} two-site tensor") from exc


def _apply_two_site(state: MatrixProductState, bond: int, gate: np.ndarray) -> float:
    """Contract-gate-split at one bond; returns the discarded weight."""
    i, j = bond, bond + 1
    lam_l = state.lambdas[i]
    lam_m = state.lambdas[i + 1]
    lam_r = state.lambdas[i + 2]
    gi = state.gammas[i]
    gj = state.gammas[j]
    di, dj = state.local_dims[i], state.local_dims[j]

    theta = lam_l[:, None, None] * gi * lam_m[None, None, :]
    theta = np.tensordot(theta, gj * lam_r[None, None, :], axes=(2, 0))  # (a, si, sj, c)
    theta = np.tensordot(gate, theta, axes=([2, 3], [1, 2]))             # (si, sj, a, c)
    theta = theta.transpose(2, 0, 1, 3)

    chi_l, chi_r = lam_l.size, lam_r.size
    mat = theta.reshape(chi_l * di, dj * chi_r)
    u, s, vh = _svd_with_fallback(mat)

    total = float(np.sum(s**2))
    if total <= 0.0:
        raise SvdFailure(f"two-site tensor at bond {bond} has zero norm")
    weights = s**2 / total
    keep_floor = int(np.sum(weights >= _WEIGHT_FLOOR))
    keep = max(1, min(state.chi_max, keep_floor, s.size))
    discarded = float(np.sum(weights[keep:]))

    s_kept = s[:keep]
    s_kept = s_kept / np.linalg.norm(s_kept)
    inv_l = 1.0 / np.maximum(lam_l, 1e-300)
    inv_r = 1.0 / np.maximum(lam_r, 1e-300)
    state.gammas[i] = (u[:, :keep].reshape(chi_l, di, keep)) * inv_l[:, None, None]
    state.gammas[j] = (vh[:keep, :].reshape(keep, dj, chi_r)) * inv_r[None, None, :]
    state.lambdas[i + 1] = s_kept
    return discarded


def step(state: MatrixProductState, gates: GateSet) -> float:
    """One second-order Trotter step in place; returns the discarded weight."""
    discarded = 0.0
    for bond, gate in gates.half_step_odd:
        discarded += _apply_two_site(state, bond, gate)
    for bond, gate in gates.even_gates:
        discarded += _apply_two_site(state, bond, gate)
    for bond, gate in gates.half_step_odd:
        discarded += _apply_two_site(state, bond, gate)
    return discarded


def _system_observables(state: MatrixProductState):
    rho = state.rho_site(0)
    tr = float(np.real(np.trace(rho)))  # equals <psi|psi>, tracks norm drift
    rho = rho / max(tr, 1e-300)
    a_op = destroy(state.local_dims[0])
    mean_a = complex(np.trace(a_op @ rho))
    num = a_op.conj().T @ a_op
    n = float(np.real(np.trace(num @ rho)))
    if n < 1e-12:
        g2 = 0.0
    else:
        aa = a_op @ a_op
        g2 = float(np.real(np.trace(aa.conj().T @ aa @ rho))) / n**2
    return mean_a, n, g2, tr


def evolve(
    state: MatrixProductState,
    p: KerrParams,
    coeffs: ChainCoefficients,
    dt: float,
    t_end: float,
    gates: GateSet | None = None,
) -> tuple[dict, TruncationReport]:
    """Trotter evolution recording system observables every step.

    Mutates `state`.  Returns ({'a','n','g2'} -> TrajectoryRecord, report);
    the report carries the per-step discarded weight, the largest bond
    dimension reached, and the final canonical-form residual.
    """
    if t_end < dt:
        raise ValueError("t_end must be at least one step")
    if gates is None:
        gates = build_gates(p, coeffs, dt, (state.local_dims[0], state.local_dims[1]))
    n_steps = int(round(t_end / dt))
    report = TruncationReport()
    mean_a = np.empty(n_steps + 1, dtype=complex)
    occ = np.empty(n_steps + 1, dtype=complex)
    g2s = np.empty(n_steps + 1, dtype=complex)
    mean_a[0], occ[0], g2s[0], _ = _system_observables(state)
    for k in range(n_steps):
        disc = step(state, gates)
        mean_a[k + 1], occ[k + 1], g2s[k + 1], norm_sq = _system_observables(state)
        report.add_step(disc, max(state.bond_dims()), abs(1.0 - norm_sq))
    report.canonical_residual = state.canonical_residual()
    times = np.arange(n_steps + 1) * dt
    records = {
        "a": TrajectoryRecord(times=times.copy(), values=mean_a, dt=dt),
        "n": TrajectoryRecord(times=times.copy(), values=occ, dt=dt),
        "g2": TrajectoryRecord(times=times.copy(), values=g2s, dt=dt),
    }
    return records, report


def reduced_density_matrix(state: MatrixProductState, site: int = 0) -> FockDensityMatrix:
    """Trace out every other site; returns a unit-trace density matrix."""
    rho = state.rho_site(site)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.real(np.trace(rho))
    return FockDensityMatrix(dim=state.local_dims[site], rho=rho)


def _cross_site0_expectation(bra: MatrixProductState, op: np.ndarray,
                             ket: MatrixProductState) -> complex:
    """<bra| op_site0 |ket> for two states over the same site dimensions."""
    env = np.array([[1.0 + 0.0j]])
    for i in range(bra.n_sites - 1, 0, -1):
        mk = ket._right_tensor(i)
        mb = bra._right_tensor(i)
        tmp = np.tensordot(mk, env, axes=(2, 0))            # (a_k, s, b_b)
        env = np.tensordot(tmp, mb.conj(), axes=([1, 2], [1, 2]))  # (a_k, a_b)
    mk = ket._right_tensor(0)
    mb = bra._right_tensor(0)
    tmp = np.tensordot(mk, env, axes=(2, 0))                # (a_k, s', b_b)
    tmp = np.tensordot(op, tmp, axes=(1, 1))                # (s, a_k, b_b)
    val = np.tensordot(tmp.transpose(1, 0, 2), mb.conj(), axes=([0, 1, 2], [0, 1, 2]))
    return complex(val)


def _check_stationary(state, p, coeffs, dt, gates, window=0.2, tol=0.02):
    probe = state.copy()
    n_steps = max(1, int(round(window / dt)))
    a0, n0, _, _ = _system_observables(probe)
    for _ in range(n_steps):
        step(probe, gates)
    a1, n1, _, _ = _system_observables(probe)
    scale_a = max(abs(a0), abs(a1), 1e-9)
    scale_n = max(abs(n0), abs(n1), 1e-9)
    drift = max(abs(a1 - a0) / scale_a, abs(n1 - n0) / scale_n)
    if drift > tol:
        raise StationarityViolated(
            f"observables drift by {drift:.1%} over {window}/g (tolerance {tol:.0%})"
        )


_SITE_OPS = {"a": lambda d: destroy(d), "adag": lambda d: destroy(d).conj().T}


def two_time_correlation(
    state_ss: MatrixProductState,
    p: KerrParams,
    coeffs: ChainCoefficients,
    op_pair: tuple,
    dt: float,
    tau_max: float,
    check_stationary: bool = True,
) -> TrajectoryRecord:
    """<A(t+tau) B(t)> on a tau grid by apply-then-evolve regression.

    op_pair names (A, B) from {'a', 'adag'}.  B is applied to a copy of the
    (approximately stationary) state; the perturbed and unperturbed states
    are then evolved side by side with identical gates and the cross
    expectation of A is read off at every step.  `state_ss` is not mutated.
    """
    a_name, b_name = op_pair
    sys_dim = state_ss.local_dims[0]
    op_a = _SITE_OPS[a_name](sys_dim)
    op_b = _SITE_OPS[b_name](sys_dim)
    gates = build_gates(p, coeffs, dt, (sys_dim, state_ss.local_dims[1]))
    if check_stationary:
        _check_stationary(state_ss, p, coeffs, dt, gates)

    psi = state_ss.copy()
    phi = state_ss.copy()
    scale = phi.apply_site_operator(op_b, 0)
    n_steps = int(round(tau_max / dt))
    values = np.empty(n_steps + 1, dtype=complex)
    values[0] = scale * _cross_site0_expectation(psi, op_a, phi)
    for k in range(n_steps):
        step(psi, gates)
        step(phi, gates)
        values[k + 1] = scale * _cross_site0_expectation(psi, op_a, phi)
    taus = np.arange(n_steps + 1) * dt
    return TrajectoryRecord(times=taus, values=values, dt=dt)


def collect_correlators(
    state_ss: MatrixProductState,
    p: KerrParams,
    coeffs: ChainCoefficients,
    dt: float,
    tau_max: float,
    check_stationary: bool = True,
) -> CorrelatorSet:
    """All correlators the quadrature-spectrum estimator needs, in one pass.

    Evolves the unperturbed state and its a- and adag-perturbed copies
    together, so the three correlators and the running mean field share one
    set of Trotter sweeps.
    """
    sys_dim = state_ss.local_dims[0]
    op_a = destroy(sys_dim)
    op_ad = op_a.conj().T
    gates = build_gates(p, coeffs, dt, (sys_dim, state_ss.local_dims[1]))
    if check_stationary:
        _check_stationary(state_ss, p, coeffs, dt, gates)

    psi = state_ss.copy()
    phi_a = state_ss.copy()
    phi_ad = state_ss.copy()
    c_a = phi_a.apply_site_operator(op_a, 0)
    c_ad = phi_ad.apply_site_operator(op_ad, 0)

    n_steps = int(round(tau_max / dt))
    adag_a = np.empty(n_steps + 1, dtype=complex)
    a_adag = np.empty(n_steps + 1, dtype=complex)
    a_a = np.empty(n_steps + 1, dtype=complex)
    adag_adag = np.empty(n_steps + 1, dtype=complex)
    mean_a_tau = np.empty(n_steps + 1, dtype=complex)
    for k in range(n_steps + 1):
        if k > 0:
            step(psi, gates)
            step(phi_a, gates)
            step(phi_ad, gates)
        adag_a[k] = c_a * _cross_site0_expectation(psi, op_ad, phi_a)
        a_a[k] = c_a * _cross_site0_expectation(psi, op_a, phi_a)
        a_adag[k] = c_ad * _cross_site0_expectation(psi, op_a, phi_ad)
        adag_adag[k] = c_ad * _cross_site0_expectation(psi, op_ad, phi_ad)
        mean_a_tau[k] = psi.site_expectation(op_a, 0)
    taus = np.arange(n_steps + 1) * dt
    return CorrelatorSet(
        taus=taus,
        adag_a=adag_a,
        a_adag=a_adag,
        a_a=a_a,
        adag_adag=adag_adag,
        mean_a_tau=mean_a_tau,
        mean_a0=complex(mean_a_tau[0]),
    )


_CHECKPOINT_VERSION = 1


def save_checkpoint(state: MatrixProductState, path, step_index: int = 0,
                    report: TruncationReport | None = None):
    """Self-describing NPZ dump; round-trips bit-exactly."""
    payload = {
        "version": np.array(_CHECKPOINT_VERSION),
        "local_dims": np.array(state.local_dims),
        "chi_max": np.array(state.chi_max),
        "step_index": np.array(step_index),
    }
    for i, g in enumerate(state.gammas):
        payload[f"gamma_{i}"] = g
    for i, l in enumerate(state.lambdas):
        payload[f"lambda_{i}"] = l
    meta = {}
    if report is not None:
        meta["report"] = {
            "per_step_discarded": list(map(float, report.per_step_discarded)),
            "cumulative_discarded": report.cumulative_discarded,
            "max_bond_dim": report.max_bond_dim,
            "canonical_residual": report.canonical_residual,
            "norm_drift_max": report.norm_drift_max,
        }
    payload["meta_json"] = np.array(json.dumps(meta))
    np.savez(path, **payload)


def load_checkpoint(path):
    """Inverse of save_checkpoint: (state, step_index, report_or_None)."""
    data = np.load(path, allow_pickle=False)
    version = int(data["version"])
    if version != _CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    local_dims = [int(d) for d in data["local_dims"]]
    n_sites = len(local_dims)
    gammas = [np.array(data[f"gamma_{i}"]) for i in range(n_sites)]
    lambdas = [np.array(data[f"lambda_{i}"]) for i in range(n_sites + 1)]
    state = MatrixProductState(local_dims, gammas, lambdas, int(data["chi_max"]))
    meta = json.loads(str(data["meta_json"]))
    report = None
    if "report" in meta:
        rep = meta["report"]
        report = TruncationReport(
            per_step_discarded=rep["per_step_discarded"],
            cumulative_discarded=rep["cumulative_discarded"],
            max_bond_dim=rep["max_bond_dim"],
            canonical_residual=rep["canonical_residual"],
            norm_drift_max=rep.get("norm_drift_max", 0.0),
        )
    return state, int(data["step_index"]), report
