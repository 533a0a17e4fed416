"""Closed-form quantum steady state of the driven Kerr cavity.

The stationary moments are ratios of generalized hypergeometric 0F2 series

    F(p, q, z) = sum_n z^n / ((p)_n (q)_n n!)

with complex lower parameters

    p = delta/chi2 + gamma/(2i chi2),   q = conj(p),   z = 2 (E/chi2)^2.

The mean field uses F(p+1, q, z) in the numerator (the first lower
parameter shifts with the annihilation count, the second with the creation
count), verified against the dense master-equation solver to machine
precision; the variants are NOT interchangeable.

The drive must be real here; complex drives can always be rotated real by a
frame choice, and the formulas assume it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ImaginaryResidue, NonConvergence, PoleInParameter
from .model import KerrParams

__all__ = [
    "HyperParams",
    "hyper_params",
    "hyper0f2",
    "mean_field",
    "mean_photon",
    "g2_zero",
]

_TERM_CAP = 100_000
_TAIL_RTOL = 1e-14


@dataclass(frozen=True)
class HyperParams:
    """Lower parameters and argument of the stationary-moment series."""

    p: complex
    q: complex
    z: float


def _real_drive(params: KerrParams) -> float:
    e = params.drive
    if abs(e.imag) > 1e-12 * max(1.0, abs(e)):
        raise ValueError(
            f"exact steady state requires a real drive, got {e} "
            "(rotate the frame so E is real)"
        )
    if params.chi2 == 0.0:
        raise ValueError("exact steady state needs chi2 != 0; use the linear-cavity closed form")
    return float(e.real)


def hyper_params(params: KerrParams) -> HyperParams:
    e0 = _real_drive(params)
    p = params.delta / params.chi2 + params.gamma / (2j * params.chi2)
    q = params.delta / params.chi2 - params.gamma / (2j * params.chi2)
    return HyperParams(p=p, q=q, z=2.0 * (e0 / params.chi2) ** 2)


def _check_pole(x: complex, name: str):
    nearest = round(x.real)
    if nearest <= 0 and abs(x - nearest) < 1e-12 * max(1.0, abs(x)):
        raise PoleInParameter(f"lower parameter {name} = {x} sits on a non-positive integer")


def hyper0f2(p: complex, q: complex, z: complex) -> complex:
    """0F2 series summed with compensated accumulation.

    Terms follow the recurrence T_{n+1} = T_n * z / ((p+n)(q+n)(n+1)); the
    sum stops once three consecutive terms fall below the relative tail
    bound 1e-14, and raises NonConvergence past 1e5 terms.
    """
    _check_pole(p, "p")
    _check_pole(q, "q")
    z = complex(z)
    if z == 0:
        return 1.0 + 0.0j

    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j  # Kahan compensation
    term = 1.0 + 0.0j
    small_streak = 0
    for n in range(_TERM_CAP):
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        term = term * z / ((p + n) * (q + n) * (n + 1))
        if abs(term) <= _TAIL_RTOL * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 3:
                return total
        else:
            small_streak = 0
    raise NonConvergence(f"0F2 tail bound not met within {_TERM_CAP} terms (z={z})")


def mean_field(params: KerrParams) -> complex:
    """Stationary <a> of the master equation, as a hypergeometric ratio."""
    e0 = _real_drive(params)
    hp = hyper_params(params)
    denom = hp.p * hyper0f2(hp.p, hp.q, hp.z)
    return -(e0 / (1j * params.chi2)) * hyper0f2(hp.p + 1, hp.q, hp.z) / denom


def mean_photon(params: KerrParams) -> float:
    """Stationary <adag a>; both lower parameters shift by one."""
    e0 = _real_drive(params)
    hp = hyper_params(params)
    value = (
        (e0 / params.chi2) ** 2
        / (hp.p * hp.q)
        * hyper0f2(hp.p + 1, hp.q + 1, hp.z)
        / hyper0f2(hp.p, hp.q, hp.z)
    )
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ImaginaryResidue(f"<n> kept imaginary part {value.imag:.3e}")
    return float(value.real)


def g2_zero(params: KerrParams) -> float:
    """Stationary g2(0) as the double-shift hypergeometric ratio."""
    e0 = _real_drive(params)
    if e0 == 0.0:
        raise ValueError("g2(0) needs a nonzero drive")
    hp = hyper_params(params)
    f00 = hyper0f2(hp.p, hp.q, hp.z)
    f11 = hyper0f2(hp.p + 1, hp.q + 1, hp.z)
    f22 = hyper0f2(hp.p + 2, hp.q + 2, hp.z)
    value = (hp.p * hp.q * f00 * f22) / ((hp.p + 1) * (hp.q + 1) * f11**2)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ImaginaryResidue(f"g2(0) kept imaginary part {value.imag:.3e}")
    return float(value.real)
