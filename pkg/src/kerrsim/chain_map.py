"""Mapping of the flat bath onto a nearest-neighbour oscillator chain.

The continuum band (-omega_c, omega_c) with mode-independent coupling c0
transforms, through normalized shifted Legendre polynomials, into a
semi-infinite chain with

    eta_prime = c0 * sqrt(2 omega_c)          (system to first site)
    omega_n   = 0                             (all on-site frequencies)
    eta_n     = omega_c (n+1)/sqrt((2n+1)(2n+3))   (site n to n+1)

The closed forms are exact; numerical Lanczos tridiagonalization of a
quadrature-discretized band is kept only as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import eval_legendre

from .model import BathSpec, KerrParams

__all__ = [
    "ChainCoefficients",
    "chain_coefficients",
    "unitary_orthonormality_check",
    "discretized_band",
    "lanczos_tridiagonalize",
    "star_single_particle_matrix",
    "chain_single_particle_matrix",
    "linear_field_trajectory",
]


@dataclass(frozen=True)
class ChainCoefficients:
    """Couplings of the chain representation of the bath."""

    eta_prime: float
    omegas: np.ndarray
    etas: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.omegas.size


def chain_coefficients(bath: BathSpec, n_sites: int | None = None) -> ChainCoefficients:
    """Closed-form chain couplings for `n_sites` oscillators (>= 2).

    The hopping sequence starts at omega_c/sqrt(3) and decreases
    monotonically toward its limit omega_c/2 from above.
    """
    n = bath.n_sites if n_sites is None else n_sites
    if n < 2:
        raise ValueError(f"chain needs at least 2 sites, got {n}")
    ks = np.arange(n - 1, dtype=float)
    etas = bath.omega_c * (ks + 1.0) / np.sqrt((2.0 * ks + 1.0) * (2.0 * ks + 3.0))
    return ChainCoefficients(
        eta_prime=bath.c0 * math.sqrt(2.0 * bath.omega_c),
        omegas=np.zeros(n),
        etas=etas,
    )


def unitary_orthonormality_check(n_polys: int, n_quad: int, x_max: float = 1.0) -> float:
    """Max deviation of the mapping functions from orthonormality.

    Builds U_n(x) = sqrt((2n+1)/(2 x_max)) * P_n(x/x_max) on a Gauss-Legendre
    grid over [-x_max, x_max] and returns max |<U_m, U_n> - delta_mn|.
    Requires n_quad >= 2*n_polys so the quadrature is exact for the products.
    """
    if n_quad < 2 * n_polys:
        raise ValueError(f"n_quad={n_quad} must be >= 2*n_polys={2 * n_polys}")
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    xs = x_max * nodes
    ws = x_max * weights
    ns = np.arange(n_polys)
    basis = np.sqrt((2.0 * ns[:, None] + 1.0) / (2.0 * x_max)) * eval_legendre(
        ns[:, None], xs[None, :] / x_max
    )
    gram = (basis * ws[None, :]) @ basis.T
    return float(np.max(np.abs(gram - np.eye(n_polys))))


def discretized_band(bath: BathSpec, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre discretization of the band: (frequencies, couplings)."""
    nodes, weights = np.polynomial.legendre.leggauss(n_modes)
    freqs = bath.omega_c * nodes
    coups = bath.c0 * np.sqrt(bath.omega_c * weights)
    return freqs, coups


def lanczos_tridiagonalize(freqs: np.ndarray, coups: np.ndarray, n_steps: int):
    """Lanczos recurrence on diag(freqs) seeded by the coupling vector.

    Returns (norm0, alphas, betas): norm0 plays the role of the system
    coupling, alphas the on-site frequencies, betas the hoppings.  Test
    oracle for the closed-form coefficients; uses full reorthogonalization
    for stability at modest sizes.
    """
    norm0 = float(np.linalg.norm(coups))
    v = coups / norm0
    basis = [v]
    alphas, betas = [], []
    for _ in range(n_steps):
        w = freqs * basis[-1]
        alpha = float(np.real(np.vdot(basis[-1], w)))
        alphas.append(alpha)
        for b in basis:
            w = w - np.vdot(b, w) * b
        for b in basis:  # second pass: classical Gram-Schmidt twice
            w = w - np.vdot(b, w) * b
        beta = float(np.linalg.norm(w))
        if beta < 1e-14 or len(alphas) == n_steps:
            break
        betas.append(beta)
        basis.append(w / beta)
    return norm0, np.array(alphas), np.array(betas)


def star_single_particle_matrix(delta: float, freqs: np.ndarray, coups: np.ndarray) -> np.ndarray:
    """One-excitation Hamiltonian of system + discretized band."""
    n = freqs.size
    h = np.zeros((n + 1, n + 1))
    h[0, 0] = delta
    h[0, 1:] = coups
    h[1:, 0] = coups
    h[np.arange(1, n + 1), np.arange(1, n + 1)] = freqs
    return h


def chain_single_particle_matrix(delta: float, coeffs: ChainCoefficients) -> np.ndarray:
    """One-excitation Hamiltonian of system + chain."""
    n = coeffs.n_sites
    h = np.zeros((n + 1, n + 1))
    h[0, 0] = delta
    h[0, 1] = h[1, 0] = coeffs.eta_prime
    for k in range(n):
        h[k + 1, k + 1] = coeffs.omegas[k]
    for k, eta in enumerate(coeffs.etas):
        h[k + 1, k + 2] = h[k + 2, k + 1] = eta
    return h


def linear_field_trajectory(
    p: KerrParams,
    coeffs: ChainCoefficients,
    t_grid: np.ndarray,
    alpha0: complex = 0.0,
) -> np.ndarray:
    """Exact chi2=0 field amplitude of the chain representation.

    For a linear oscillator the chain model closes on the single-particle
    amplitudes, so the driven system + chain reduces to a stiff linear ODE;
    this is the truncation-free reference that isolates what tensor-network
    evolution adds on top of the chain approximation itself.
    """
    if p.chi2 != 0.0:
        raise ValueError("linear_field_trajectory is only defined for chi2 = 0")
    t_grid = np.asarray(t_grid, dtype=float)
    h = chain_single_particle_matrix(p.delta, coeffs).astype(complex)
    dim = h.shape[0]
    drive = np.zeros(dim, dtype=complex)
    drive[0] = -p.drive

    def rhs(_t, y):
        v = y[:dim] + 1j * y[dim:]
        dv = -1j * (h @ v) + drive
        return np.concatenate([dv.real, dv.imag])

    y0 = np.zeros(2 * dim)
    y0[0] = complex(alpha0).real
    y0[dim] = complex(alpha0).imag
    sol = solve_ivp(rhs, (float(t_grid[0]), float(t_grid[-1])), y0,
                    t_eval=t_grid, rtol=1e-10, atol=1e-12)
    return sol.y[0] + 1j * sol.y[dim]
