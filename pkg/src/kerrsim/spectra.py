"""Quadrature fluctuation spectra of the driven Kerr oscillator.

Analytic route: linearize the field equation around a working amplitude
alpha, solve the resulting two-component response in frequency space, and
assemble the symmetrized quadrature spectrum S^theta(omega) from the direct
and cross susceptibilities.  Numeric routes: Welch periodograms of
noise-driven trajectories, and Fourier transforms of two-time correlators
measured on the tensor-network state.

Absolute normalizations of the three routes are not matched to each other;
`SpectrumResult.unit_peak()` rescales for shape/peak-position comparison,
which is the only cross-method comparison supported.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import NoSplittingRegime, PoleHit, TooShort
from .model import KerrParams

__all__ = [
    "LinearizedCoefficients",
    "SpectrumResult",
    "CorrelatorSet",
    "linearized_coefficients",
    "susceptibilities",
    "analytic_spectrum",
    "poles",
    "pole_radicand",
    "decay_exponents",
    "is_linearly_stable",
    "splitting_bounds",
    "numeric_spectrum_langevin",
    "numeric_spectrum_tebd",
    "default_omega_grid",
    "default_theta_grid",
]


@dataclass(frozen=True)
class LinearizedCoefficients:
    """Coefficients of the linearized response at one frequency.

    a_coef multiplies the field component, c_coef its conjugate partner at
    -omega, and b_coef couples the two; they satisfy
    a_coef(-omega) == conj(c_coef(omega)).
    """

    a_coef: complex
    b_coef: complex
    c_coef: complex

    @property
    def determinant(self) -> complex:
        return self.a_coef * self.c_coef - abs(self.b_coef) ** 2


def linearized_coefficients(p: KerrParams, alpha: complex, omega: float) -> LinearizedCoefficients:
    n = abs(alpha) ** 2
    a_coef = -1j * omega + 1j * p.delta + 0.5 * p.gamma + 4j * p.chi2 * n
    b_coef = 2j * p.chi2 * alpha**2
    c_coef = -1j * omega - 1j * p.delta + 0.5 * p.gamma - 4j * p.chi2 * n
    return LinearizedCoefficients(a_coef, b_coef, c_coef)


def susceptibilities(p: KerrParams, alpha: complex, omega: float) -> tuple[complex, complex]:
    """Direct and cross susceptibilities (chi_d, chi_x) at one frequency."""
    co = linearized_coefficients(p, alpha, omega)
    det = co.determinant
    scale = max(1.0, abs(co.a_coef) * abs(co.c_coef))
    if abs(det) < 1e-300 * scale:
        raise PoleHit(f"linearized response singular at omega={omega}")
    root_gamma = math.sqrt(p.gamma)
    return root_gamma * co.c_coef / det, -root_gamma * co.b_coef / det


@dataclass
class SpectrumResult:
    """S^theta(omega) sampled on an (omega, theta) grid.

    values has shape (len(thetas), len(omegas)).  provenance records which
    route produced the numbers; alpha_used is the working amplitude the
    route linearized around (or the state mean for numeric routes).
    """

    omegas: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    provenance: str
    alpha_used: complex = 0.0 + 0.0j

    VALID_PROVENANCE = (
        "analytic_semiclassical",
        "analytic_quantum_alpha",
        "numeric_langevin",
        "numeric_tebd",
    )

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.provenance not in self.VALID_PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.values.shape != (self.thetas.size, self.omegas.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"(n_theta={self.thetas.size}, n_omega={self.omegas.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum contains non-finite values")

    def unit_peak(self) -> "SpectrumResult":
        """Copy rescaled so the global maximum equals 1."""
        peak = float(np.max(np.abs(self.values)))
        scale = 1.0 / peak if peak > 0 else 1.0
        return SpectrumResult(
            self.omegas.copy(), self.thetas.copy(), self.values * scale,
            self.provenance, self.alpha_used,
        )

    def peak_omega(self, theta_index: int = 0) -> float:
        """Frequency of the largest value along one theta row."""
        return float(self.omegas[int(np.argmax(self.values[theta_index]))])

    def to_csv(self, path, extra_header: dict | None = None):
        """Long-format CSV (omega, theta, value) with a '#' header block."""
        lines = [
            f"# provenance: {self.provenance}",
            f"# alpha_used: {self.alpha_used.real:.12g}{self.alpha_used.imag:+.12g}j",
        ]
        for key, val in (extra_header or {}).items():
            lines.append(f"# {key}: {val}")
        lines.append("omega,theta,value")
        for i, th in enumerate(self.thetas):
            for j, om in enumerate(self.omegas):
                lines.append(f"{om:.12g},{th:.12g},{self.values[i, j]:.12g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def default_omega_grid(p: KerrParams, n: int = 512) -> np.ndarray:
    half = 3.0 * max(abs(p.delta), 1.0)
    return np.linspace(-half, half, n)


def default_theta_grid(n: int = 64) -> np.ndarray:
    return np.linspace(0.0, math.pi, n, endpoint=False)


def analytic_spectrum(
    p: KerrParams,
    alpha: complex,
    omega_grid: np.ndarray,
    theta_grid: np.ndarray,
    provenance: str = "analytic_semiclassical",
) -> SpectrumResult:
    """Closed-form quadrature spectrum of the linearized response.

    S^theta(omega) = 1/4 [ |chi_d(w)|^2 + |chi_d(-w)|^2 + |chi_x(w)|^2
                           + |chi_x(-w)|^2
                           + 2 cos(2 theta - phi) |chi_d(w) chi_x(-w)
                                                  + chi_d(-w) chi_x(w)| ]

    with phi the argument of the cross combination.  The working amplitude
    alpha is taken from a semiclassical branch root or from the exact
    quantum mean field, recorded via `provenance`.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)

    chi_d_pos = np.empty(omega_grid.size, dtype=complex)
    chi_x_pos = np.empty(omega_grid.size, dtype=complex)
    chi_d_neg = np.empty(omega_grid.size, dtype=complex)
    chi_x_neg = np.empty(omega_grid.size, dtype=complex)
    for j, om in enumerate(omega_grid):
        chi_d_pos[j], chi_x_pos[j] = susceptibilities(p, alpha, om)
        chi_d_neg[j], chi_x_neg[j] = susceptibilities(p, alpha, -om)

    base = (
        np.abs(chi_d_pos) ** 2
        + np.abs(chi_d_neg) ** 2
        + np.abs(chi_x_pos) ** 2
        + np.abs(chi_x_neg) ** 2
    )
    cross = chi_d_pos * chi_x_neg + chi_d_neg * chi_x_pos
    phi = np.angle(cross)
    amp = np.abs(cross)

    values = 0.25 * (base[None, :] + 2.0 * np.cos(2.0 * theta_grid[:, None] - phi[None, :]) * amp[None, :])
    return SpectrumResult(omega_grid, theta_grid, values, provenance, alpha)


def pole_radicand(p: KerrParams, n: float) -> float:
    """Radicand (delta + 4 chi2 n)^2 - 4 chi2^2 n^2 controlling the poles."""
    return (p.delta + 4.0 * p.chi2 * n) ** 2 - 4.0 * p.chi2**2 * n**2


def poles(p: KerrParams, alpha: complex) -> tuple[complex, complex]:
    """Pole pair of the linearized spectrum, principal branch of the root.

    Returned as (omega_plus, omega_minus) = (i*gamma/2 - sqrt(R),
    -i*gamma/2 + sqrt(R)); the real parts locate the split peaks whenever
    the radicand R is positive.
    """
    root = cmath.sqrt(pole_radicand(p, abs(alpha) ** 2))
    omega_plus = 0.5 * (1j * p.gamma - 2.0 * root)
    omega_minus = 0.5 * (-1j * p.gamma + 2.0 * root)
    return omega_plus, omega_minus


def decay_exponents(p: KerrParams, alpha: complex) -> tuple[complex, complex]:
    """Time-domain exponents s of the linearized fluctuation dynamics.

    Fluctuations evolve as exp(s*t) with s = -gamma/2 +- i*sqrt(R); the
    working point is linearly stable iff both real parts are negative.
    """
    root = cmath.sqrt(pole_radicand(p, abs(alpha) ** 2))
    return -0.5 * p.gamma + 1j * root, -0.5 * p.gamma - 1j * root


def is_linearly_stable(p: KerrParams, alpha: complex) -> bool:
    s_plus, s_minus = decay_exponents(p, alpha)
    return max(s_plus.real, s_minus.real) < 0.0


def splitting_bounds(p: KerrParams) -> tuple[float, float]:
    """Occupation bounds outside of which the pole pair splits.

    Splitting requires n <= -delta/(6 chi2) on the dim side or
    n >= -delta/(2 chi2) on the bright side; in between the radicand is
    negative and the response shows a single peak.
    """
    if p.chi2 * p.delta >= 0:
        raise NoSplittingRegime(
            f"chi2*delta = {p.chi2 * p.delta} >= 0: no splitting regime"
        )
    return -p.delta / (6.0 * p.chi2), -p.delta / (2.0 * p.chi2)


def numeric_spectrum_langevin(
    trajectories,
    theta_grid: np.ndarray,
    window: int | None = None,
) -> SpectrumResult:
    """Welch estimate of the quadrature spectrum from stochastic trajectories.

    The first 25% of each record is discarded as transient; the remainder
    feeds Hann-windowed, 50%-overlap periodograms of the demeaned quadrature
    X^theta = (conj(a) e^{i theta} + a e^{-i theta})/sqrt(2), averaged over
    the ensemble.  The one-sided estimate is mirrored onto a symmetric
    frequency axis, matching the evenness of the symmetrized definition.
    """
    trajectories = list(trajectories)
    if len(trajectories) < 8:
        raise ValueError(f"need at least 8 trajectories, got {len(trajectories)}")
    theta_grid = np.asarray(theta_grid, dtype=float)

    dt = trajectories[0].dt
    segments = []
    for rec in trajectories:
        vals = np.asarray(rec.values)
        segments.append(vals[vals.size // 4:])
    seg_len = min(s.size for s in segments)
    nperseg = window if window is not None else min(seg_len // 4, 4096)
    if nperseg < 8 or seg_len < 4 * nperseg:
        raise TooShort(
            f"stationary segment ({seg_len} samples) shorter than 4 windows of {nperseg}"
        )

    fs = 1.0 / dt
    mean_alpha = np.mean([s.mean() for s in segments])
    rows_out = []
    freqs = None
    for theta in theta_grid:
        phase = cmath.exp(-1j * theta)
        rows = []
        for s in segments:
            x = math.sqrt(2.0) * (s * phase).real
            x = x - x.mean()
            freqs, pxx = signal.welch(
                x, fs=fs, window="hann", nperseg=nperseg,
                noverlap=nperseg // 2, detrend=False, return_onesided=False,
            )
            rows.append(pxx)
        rows_out.append(np.mean(rows, axis=0))

    omegas = 2.0 * math.pi * np.fft.fftshift(freqs)
    values = np.fft.fftshift(np.asarray(rows_out), axes=1)
    return SpectrumResult(omegas, theta_grid, values, "numeric_langevin", mean_alpha)


@dataclass
class CorrelatorSet:
    """Two-time correlators of the oscillator site on a tau >= 0 grid.

    adag_a[k]    = <adag(t+tau_k) a(t)>
    a_adag[k]    = <a(t+tau_k) adag(t)>
    a_a[k]       = <a(t+tau_k) a(t)>
    adag_adag[k] = <adag(t+tau_k) adag(t)>
    mean_a_tau[k] = <a(t+tau_k)> along the unperturbed evolution,
    mean_a0 = <a(t)> at the anchor time.
    """

    taus: np.ndarray
    adag_a: np.ndarray
    a_adag: np.ndarray
    a_a: np.ndarray
    adag_adag: np.ndarray
    mean_a_tau: np.ndarray
    mean_a0: complex = field(default=0.0 + 0.0j)


def numeric_spectrum_tebd(
    correlators: CorrelatorSet,
    theta_grid: np.ndarray,
    omega_grid: np.ndarray | None = None,
) -> SpectrumResult:
    """Quadrature spectrum assembled from tensor-network two-time correlators.

    Builds the symmetrized quadrature correlator

        C_theta(tau) = Re <dX(t+tau) dX(t)>,   dX = (da^+ e^{i th} + da e^{-i th})/sqrt(2)

    from the four fluctuation correlators (means subtracted), Hann-tapers
    it, and cosine-transforms; stationarity makes C_theta even in tau, so
    the result is even in omega by construction.  The commutator part of
    C_theta carries the filtered vacuum, so a linear cavity shows its
    response line even when the state is exactly coherent.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    taus = np.asarray(correlators.taus, dtype=float)
    if omega_grid is None:
        span = 3.0 * math.pi / max(taus[1] - taus[0], 1e-12)
        omega_grid = np.linspace(-span / 8, span / 8, 512)
    omega_grid = np.asarray(omega_grid, dtype=float)

    mean_tau = np.asarray(correlators.mean_a_tau)
    mean0 = correlators.mean_a0
    f_da = np.asarray(correlators.adag_a) - np.conj(mean_tau) * mean0
    f_ad = np.asarray(correlators.a_adag) - mean_tau * np.conj(mean0)
    f_aa = np.asarray(correlators.a_a) - mean_tau * mean0
    f_dd = np.asarray(correlators.adag_adag) - np.conj(mean_tau) * np.conj(mean0)

    tau_max = taus[-1]
    taper = 0.5 * (1.0 + np.cos(math.pi * taus / tau_max))
    dtau = taus[1] - taus[0]
    trap = np.full(taus.size, dtau)
    trap[0] *= 0.5
    trap[-1] *= 0.5
    weights = taper * trap

    cos_mat = np.cos(np.outer(omega_grid, taus))
    phase = np.exp(2j * theta_grid)
    # C_theta(tau) = 0.5*Re[e^{2i th} f_dd + f_da + f_ad + e^{-2i th} f_aa]
    c_theta = 0.5 * np.real(
        phase[:, None] * f_dd[None, :]
        + np.conj(phase)[:, None] * f_aa[None, :]
        + (f_da + f_ad)[None, :]
    )
    values = 2.0 * (c_theta * weights[None, :]) @ cos_mat.T
    return SpectrumResult(
        omega_grid, theta_grid, values, "numeric_tebd", complex(mean0)
    )
