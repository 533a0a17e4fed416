"""Physical model shared by every solver.

All frequencies, rates and drive amplitudes are dimensionless, expressed in
units of the inverse bath density of states g.  The working frame co-rotates
with the drive, so the oscillator appears at detuning `delta` and the bath
band is centred on zero.

Drive-sign convention
---------------------
The normative equation of motion for the field amplitude is

    da/dt = -i*delta*a - 2i*chi2*|a|^2*a - E - (gamma/2)*a

i.e. the drive enters with a minus sign.  The matching Hamiltonian drive
term is i(conj(E)*a - E*adag), which reproduces the same equation.  Relative
to the opposite (+E) convention this is a rotation of the field frame by pi
(a -> -a); phase-space coordinates quoted in that convention map onto this
one by adding pi to their phase.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "KerrParams",
    "BathSpec",
    "InitialState",
    "spectral_density",
    "eom_rhs",
]


@dataclass(frozen=True)
class KerrParams:
    """Oscillator parameters in units of g.

    delta : detuning of the oscillator from the drive.
    chi2  : anharmonicity (chi2 = 0 means a plain linear cavity).
    gamma : energy dissipation rate, must be positive.
    drive : complex drive amplitude E.

    Defaults are the reference working point used throughout the test
    suite: delta=-12, chi2=1.5, gamma=6.28.
    """

    delta: float = -12.0
    chi2: float = 1.5
    gamma: float = 6.28
    drive: complex = 0.0 + 0.0j

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def with_drive(self, drive: complex) -> "KerrParams":
        return KerrParams(self.delta, self.chi2, self.gamma, complex(drive))


@dataclass(frozen=True)
class BathSpec:
    """Flat bath with a hard frequency cutoff at +-omega_c.

    c0 is the (mode-independent) coupling amplitude; the dissipation rate it
    produces is gamma = 2*pi*c0**2.  n_sites is the number of oscillators the
    chain representation of this bath uses.
    """

    omega_c: float
    c0: float
    n_sites: int

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")

    @classmethod
    def for_gamma(cls, gamma: float, omega_c: float, n_sites: int) -> "BathSpec":
        """Bath whose flat coupling reproduces the dissipation rate gamma."""
        return cls(omega_c=omega_c, c0=math.sqrt(gamma / (2.0 * math.pi)), n_sites=n_sites)

    @property
    def gamma(self) -> float:
        return 2.0 * math.pi * self.c0**2

    def consistent_with(self, gamma: float, rtol: float = 1e-12) -> bool:
        return abs(self.gamma - gamma) <= rtol * max(1.0, abs(gamma))


@dataclass(frozen=True)
class InitialState:
    """Coherent initial state r*exp(i*phase) given as (amplitude, phase)."""

    amplitude: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    @property
    def alpha(self) -> complex:
        return self.amplitude * cmath.exp(1j * self.phase)

    @classmethod
    def from_alpha(cls, alpha: complex) -> "InitialState":
        return cls(abs(alpha), cmath.phase(alpha))


def spectral_density(omega: float, bath: BathSpec) -> float:
    """Bath spectral density gamma/2 inside (-omega_c, omega_c), 0 outside.

    At |omega| == omega_c exactly, the half-step convention Theta(0) = 1/2
    applies to the edge factor, so the returned value is gamma/4.
    """
    gamma = bath.gamma

    def theta(x: float) -> float:
        if x > 0:
            return 1.0
        if x < 0:
            return 0.0
        return 0.5

    return 0.5 * gamma * theta(omega + bath.omega_c) * theta(bath.omega_c - omega)


def eom_rhs(a: complex, p: KerrParams) -> complex:
    """Mean-field right-hand side of the field equation of motion.

    The cubic term uses the mean-field replacement adag*a^2 -> |a|^2 * a.
    """
    return (
        -1j * p.delta * a
        - 2j * p.chi2 * (a.real**2 + a.imag**2) * a
        - p.drive
        - 0.5 * p.gamma * a
    )
