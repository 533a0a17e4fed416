"""Dense exact references shared by the tensor-network tests.

Builds the full Hilbert-space Hamiltonian of the system + chain on tiny
instances and evolves by exact exponentiation, so the tensor-network
results can be checked against something with no Trotter or truncation
error at all.
"""

import numpy as np
import scipy.linalg

from kerrsim.chain_map import ChainCoefficients
from kerrsim.lindblad import destroy
from kerrsim.model import KerrParams


def system_hamiltonian(p: KerrParams, dim: int) -> np.ndarray:
    a = destroy(dim)
    ks = np.arange(dim, dtype=float)
    h = np.diag(p.delta * ks + p.chi2 * ks * (ks - 1.0)).astype(complex)
    return h + 1j * (np.conj(p.drive) * a - p.drive * a.conj().T)


def _embed(ops_by_site: dict, dims: list) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) for d in dims]
    for site, op in ops_by_site.items():
        mats[site] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def dense_chain_hamiltonian(p: KerrParams, coeffs: ChainCoefficients,
                            sys_dim: int, chain_dim: int) -> np.ndarray:
    n_chain = coeffs.n_sites
    dims = [sys_dim] + [chain_dim] * n_chain
    a = destroy(sys_dim)
    b = destroy(chain_dim)
    h = _embed({0: system_hamiltonian(p, sys_dim)}, dims)
    h += coeffs.eta_prime * (_embed({0: a.conj().T, 1: b}, dims)
                             + _embed({0: a, 1: b.conj().T}, dims))
    for k, eta in enumerate(coeffs.etas):
        h += eta * (_embed({k + 1: b.conj().T, k + 2: b}, dims)
                    + _embed({k + 1: b, k + 2: b.conj().T}, dims))
    for k, w in enumerate(coeffs.omegas):
        if w != 0.0:
            h += w * _embed({k + 1: b.conj().T @ b}, dims)
    return h


def mps_to_dense(state) -> np.ndarray:
    """Contract a small MPS into a full state vector."""
    psi = state.lambdas[0][:, None] * state.gammas[0].reshape(state.lambdas[0].size, -1)
    psi = psi.reshape(-1, state.gammas[0].shape[2]) * state.lambdas[1][None, :]
    for i in range(1, state.n_sites):
        g = state.gammas[i] * state.lambdas[i + 1][None, None, :]
        psi = np.tensordot(psi, g, axes=(1, 0))
        psi = psi.reshape(-1, g.shape[2])
    return psi[:, 0]


def dense_site0_expectation(psi: np.ndarray, op: np.ndarray, dims: list) -> complex:
    full = _embed({0: op}, dims)
    return complex(psi.conj() @ full @ psi)
