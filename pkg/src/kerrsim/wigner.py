"""Phase-space quasiprobability maps from truncated-Fock density matrices.

Convention (fixed here, stated once, used everywhere): the map W(beta) is
normalized so that

    integral W(beta) d^2 beta = 1,

which puts the vacuum peak at 2/pi, bounds |W| by 2/pi, and makes the
purity identity  Tr(rho^2) = pi * integral W^2 d^2 beta  hold exactly.

Evaluation uses the displaced-parity form: W(beta) is a sum over density
matrix elements weighted by associated Laguerre polynomials of 4|beta|^2,
computed by upward recurrence with log-magnitude prefactors so cutoffs up
to ~60 stay inside double-precision range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter
from scipy.special import gammaln

from .errors import GridTooCoarse, ImaginaryResidue
from .lindblad import FockDensityMatrix

__all__ = ["WignerField", "wigner_from_density", "lobe_locations"]


@dataclass
class WignerField:
    """W sampled on a square grid: values[i, j] = W(re_grid[j] + 1j*im_grid[i])."""

    re_grid: np.ndarray
    im_grid: np.ndarray
    values: np.ndarray
    dx: float

    def integral(self) -> float:
        return float(np.sum(self.values) * self.dx**2)

    def purity_integral(self) -> float:
        """pi * integral W^2 d^2 beta, the phase-space purity estimate."""
        return float(math.pi * np.sum(self.values**2) * self.dx**2)

    def min_value(self) -> float:
        return float(self.values.min())

    def to_csv(self, path, extra_header: dict | None = None):
        """Matrix dump with '#' header lines carrying both axes."""
        lines = [
            "# rows: Im(beta) axis, columns: Re(beta) axis",
            "# re_axis: " + ",".join(f"{x:.12g}" for x in self.re_grid),
            "# im_axis: " + ",".join(f"{x:.12g}" for x in self.im_grid),
            f"# dx: {self.dx:.12g}",
        ]
        for key, val in (extra_header or {}).items():
            lines.append(f"# {key}: {val}")
        for row in self.values:
            lines.append(",".join(f"{v:.12g}" for v in row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def wigner_from_density(
    rho: FockDensityMatrix,
    half_width: float,
    n_points: int = 201,
) -> WignerField:
    """W(beta) on [-half_width, half_width]^2 from a Fock density matrix.

    half_width should cover the state: half_width^2 >= 4*(<n>+1) is a good
    rule.  Raises GridTooCoarse when the grid integral misses 1 by more
    than 1e-2.
    """
    if n_points < 32:
        raise ValueError(f"n_points must be >= 32, got {n_points}")
    dim = rho.dim
    axis = np.linspace(-half_width, half_width, n_points)
    dx = axis[1] - axis[0]
    re, im = np.meshgrid(axis, axis)
    beta = re + 1j * im
    u = 4.0 * np.abs(beta) ** 2  # Laguerre argument
    log_2r = np.log(np.maximum(2.0 * np.abs(beta), 1e-300))
    phase = np.exp(1j * np.angle(beta))

    values_c = np.zeros_like(u, dtype=complex)
    for k in range(dim):  # k = m - n, the diagonal offset of rho
        band = np.zeros_like(u, dtype=complex)
        l_prev = None
        l_curr = np.ones_like(u)  # L_0^(k)
        for n in range(dim - k):
            if n == 1:
                l_prev, l_curr = l_curr, 1.0 + k - u
            elif n >= 2:
                nm1 = n - 1
                l_prev, l_curr = l_curr, (
                    (2 * nm1 + 1 + k - u) * l_curr - (nm1 + k) * l_prev
                ) / n
            coeff = rho.rho[n, n + k]
            if coeff != 0:
                # sqrt(n!/m!) * (2|beta|)^k * exp(-2|beta|^2), all in log space
                log_mag = 0.5 * (gammaln(n + 1) - gammaln(n + k + 1)) + k * log_2r - 0.5 * u
                band = band + ((-1.0) ** n * coeff) * np.exp(log_mag) * l_curr
        if k == 0:
            values_c += band
        else:
            values_c += 2.0 * (band * phase**k).real

    values_c *= 2.0 / math.pi
    imag_resid = float(np.max(np.abs(values_c.imag)))
    if imag_resid > 1e-10:
        raise ImaginaryResidue(f"phase-space map kept imaginary residue {imag_resid:.3e}")
    values = values_c.real

    field = WignerField(re_grid=axis, im_grid=axis, values=values, dx=float(dx))
    norm_err = abs(field.integral() - 1.0)
    if norm_err > 1e-2:
        raise GridTooCoarse(
            f"grid integral off by {norm_err:.3e}; widen the window or refine the grid"
        )
    return field


def lobe_locations(field: WignerField, threshold_frac: float) -> list:
    """Local maxima above threshold_frac * max(W), sorted by |beta|."""
    if not 0.0 < threshold_frac < 1.0:
        raise ValueError("threshold_frac must lie strictly between 0 and 1")
    w = field.values
    local_max = w == maximum_filter(w, size=3, mode="nearest")
    strong = w >= threshold_frac * w.max()
    ii, jj = np.nonzero(local_max & strong)
    lobes = [complex(field.re_grid[j], field.im_grid[i]) for i, j in zip(ii, jj)]
    lobes.sort(key=abs)
    return lobes
