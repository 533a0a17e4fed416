"""Semiclassical steady states and time propagation of the field equation.

Steady-state occupations solve the cubic

    n * ((delta + 2*chi2*n)^2 + gamma^2/4) = |E|^2

and the field at each root is alpha = -E / (i*(delta + 2*chi2*n) + gamma/2).
Stability is classified from the linearized fluctuation exponents; the
middle root of a bistable triple is always unstable.

Propagation is deliberately first order: plain forward Euler for the
deterministic equation, Euler-Maruyama with vacuum-level noise for
stochastic ensembles.  Both fail loudly (Diverged) instead of clamping when
the step size cannot hold the stiffness.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import Diverged, NoBistability
from .model import InitialState, KerrParams, eom_rhs
from .spectra import is_linearly_stable

__all__ = [
    "Branch",
    "BranchPoint",
    "TrajectoryRecord",
    "steady_states",
    "turning_points",
    "bistable_drive_window",
    "evolve_euler",
    "evolve_euler_maruyama",
    "signed_area",
]


class Branch(str, Enum):
    LOWER = "lower"
    METASTABLE = "metastable"
    UPPER = "upper"


@dataclass(frozen=True)
class BranchPoint:
    """One steady-state root: occupation n, field alpha, branch label."""

    n: float
    alpha: complex
    branch: Branch
    stable: bool


@dataclass
class TrajectoryRecord:
    """Uniformly sampled complex time series.

    times[k] = k*dt including the initial point; seed is set for stochastic
    trajectories and None for deterministic ones.
    """

    times: np.ndarray
    values: np.ndarray
    dt: float
    seed: int | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.times.size != self.values.size:
            raise ValueError("times and values length mismatch")

    def validate_uniform(self, rtol: float = 1e-9):
        diffs = np.diff(self.times)
        if diffs.size and not np.allclose(diffs, self.dt, rtol=rtol, atol=1e-12):
            raise ValueError("times are not uniformly spaced by dt")
        if diffs.size and not np.all(diffs > 0):
            raise ValueError("times are not strictly increasing")


def _occupation_residual(n: float, p: KerrParams) -> float:
    return n * ((p.delta + 2.0 * p.chi2 * n) ** 2 + 0.25 * p.gamma**2) - abs(p.drive) ** 2


def _cubic_roots_closed_form(p: KerrParams) -> list[float]:
    """Real roots of the occupation cubic via the depressed closed form.

    Shifts out the quadratic term, branches on the discriminant (Cardano for
    one real root, the trigonometric form for three), then polishes each
    candidate with a few Newton steps on the original cubic.  Near-real
    candidates with |Im n| < 1e-9*max(1,|n|) are accepted.
    """
    chi, delta, gamma, e2 = p.chi2, p.delta, p.gamma, abs(p.drive) ** 2
    a3 = 4.0 * chi**2
    a2 = 4.0 * chi * delta
    a1 = delta**2 + 0.25 * gamma**2
    a0 = -e2
    # depressed form t^3 + p_c t + q_c with n = t - a2/(3 a3)
    shift = a2 / (3.0 * a3)
    p_c = a1 / a3 - shift**2 * 3.0
    q_c = 2.0 * shift**3 - shift * a1 / a3 + a0 / a3

    disc = (q_c / 2.0) ** 2 + (p_c / 3.0) ** 3
    candidates: list[complex] = []
    if disc > 0:
        s = math.sqrt(disc)
        u = np.cbrt(-q_c / 2.0 + s)
        v = np.cbrt(-q_c / 2.0 - s)
        candidates.append(u + v - shift)
    elif p_c == 0.0:
        candidates.append(np.cbrt(-q_c) - shift)
    else:
        r = 2.0 * math.sqrt(-p_c / 3.0)
        arg = 3.0 * q_c / (p_c * r)
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg)
        for k in range(3):
            candidates.append(r * math.cos((phi - 2.0 * math.pi * k) / 3.0) - shift)

    roots = []
    for cand in candidates:
        if abs(complex(cand).imag) > 1e-9 * max(1.0, abs(cand)):
            continue
        n = float(np.real(cand))
        # Newton polish on the original cubic
        for _ in range(50):
            f = _occupation_residual(n, p)
            df = (
                (p.delta + 2.0 * chi * n) ** 2
                + 0.25 * gamma**2
                + 4.0 * chi * n * (p.delta + 2.0 * chi * n)
            )
            if df == 0.0:
                break
            step = f / df
            n -= step
            if abs(step) < 1e-15 * max(1.0, abs(n)):
                break
        roots.append(n)
    # dedupe (coalescing roots at the window edges polish to the same point)
    roots.sort()
    out: list[float] = []
    for n in roots:
        if n < -1e-12:
            continue
        n = max(n, 0.0)
        if out and abs(n - out[-1]) < 1e-8 * max(1.0, n):
            continue
        out.append(n)
    return out


def steady_states(p: KerrParams) -> list[BranchPoint]:
    """All non-negative steady-state roots, ascending in occupation.

    Returns one or three points; the middle point of a triple is labelled
    metastable and comes out unstable under the linearized classification.
    """
    if p.chi2 == 0.0:
        denom = p.delta**2 + 0.25 * p.gamma**2
        ns = [abs(p.drive) ** 2 / denom]
    elif p.drive == 0:
        ns = [0.0]
    else:
        ns = _cubic_roots_closed_form(p)

    points = []
    for i, n in enumerate(ns):
        alpha = -p.drive / (1j * (p.delta + 2.0 * p.chi2 * n) + 0.5 * p.gamma)
        if len(ns) == 3:
            branch = (Branch.LOWER, Branch.METASTABLE, Branch.UPPER)[i]
        else:
            branch = _single_root_branch(p, n)
        points.append(BranchPoint(n=n, alpha=alpha, branch=branch,
                                  stable=is_linearly_stable(p, alpha)))
    return points


def _single_root_branch(p: KerrParams, n: float) -> Branch:
    try:
        n_l, n_u = turning_points(p)
    except NoBistability:
        return Branch.LOWER
    if n >= n_u:
        return Branch.UPPER
    if n <= n_l:
        return Branch.LOWER
    return Branch.METASTABLE


def turning_points(p: KerrParams) -> tuple[float, float]:
    """Occupations bounding the bistable window, (n_l, n_u) with n_l < n_u.

    Requires detuning beyond the critical value delta^2 > 3*gamma^2/4 and
    chi2*delta < 0 so both extrema sit at positive occupation.
    """
    disc = p.delta**2 - 0.75 * p.gamma**2
    if disc <= 0:
        raise NoBistability(
            f"delta^2 = {p.delta**2} does not exceed 3*gamma^2/4 = {0.75 * p.gamma**2}"
        )
    if p.chi2 * p.delta >= 0:
        raise NoBistability(f"chi2*delta = {p.chi2 * p.delta} >= 0: turning points not positive")
    root = math.sqrt(disc)
    n_a = (-2.0 * p.delta - root) / (6.0 * p.chi2)
    n_b = (-2.0 * p.delta + root) / (6.0 * p.chi2)
    return (n_a, n_b) if n_a < n_b else (n_b, n_a)


def bistable_drive_window(p: KerrParams) -> tuple[float, float]:
    """Drive magnitudes (E_min, E_max) strictly inside which three roots exist."""
    n_l, n_u = turning_points(p)
    e_at = lambda n: math.sqrt(n * ((p.delta + 2.0 * p.chi2 * n) ** 2 + 0.25 * p.gamma**2))
    return e_at(n_u), e_at(n_l)


def _coerce_alpha0(a0) -> complex:
    if isinstance(a0, InitialState):
        return a0.alpha
    return complex(a0)


def evolve_euler(
    p: KerrParams,
    a0,
    dt: float,
    t_end: float,
    guard: float = 1e6,
) -> TrajectoryRecord:
    """Forward-Euler propagation of the field equation, recording every step.

    a0 may be an InitialState or a complex amplitude.  Raises Diverged when
    |a| exceeds `guard`, which signals a step size too large for the
    stiffness rather than physics.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < dt:
        raise ValueError("t_end must be at least one step")
    n_steps = int(round(t_end / dt))
    a = _coerce_alpha0(a0)
    values = np.empty(n_steps + 1, dtype=complex)
    values[0] = a
    for k in range(n_steps):
        a = a + dt * eom_rhs(a, p)
        if abs(a) > guard:
            raise Diverged(f"|a| exceeded guard {guard:g} at step {k + 1}")
        values[k + 1] = a
    times = np.arange(n_steps + 1) * dt
    return TrajectoryRecord(times=times, values=values, dt=dt)


def evolve_euler_maruyama(
    p: KerrParams,
    a0,
    dt: float,
    t_end: float,
    seed: int,
    n_traj: int,
    guard: float = 1e6,
) -> list[TrajectoryRecord]:
    """Euler-Maruyama ensemble with vacuum-level complex Gaussian noise.

    Each step adds sqrt(gamma*dt/2) * (xi1 + i*xi2)/sqrt(2) with unit
    normal xi; this normalization makes the chi2=0, E=0 stationary
    symmetrized variance equal 1/2.  Trajectory k draws from the stream
    (seed, k), so results are reproducible and order-independent.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    n_steps = int(round(t_end / dt))
    alpha0 = _coerce_alpha0(a0)
    amp = math.sqrt(p.gamma * dt / 2.0) / math.sqrt(2.0)
    out = []
    times = np.arange(n_steps + 1) * dt
    for k in range(n_traj):
        rng = np.random.default_rng([seed, k])
        noise = amp * (rng.standard_normal(n_steps) + 1j * rng.standard_normal(n_steps))
        a = alpha0
        values = np.empty(n_steps + 1, dtype=complex)
        values[0] = a
        for j in range(n_steps):
            a = a + dt * eom_rhs(a, p) + noise[j]
            if abs(a) > guard:
                raise Diverged(f"|a| exceeded guard {guard:g} at step {j + 1} of trajectory {k}")
            values[j + 1] = a
        out.append(TrajectoryRecord(times=times.copy(), values=values, dt=dt, seed=seed))
    return out


def signed_area(record: TrajectoryRecord, center: complex = 0.0 + 0.0j) -> float:
    """Shoelace area swept by (Re a, Im a) around `center`.

    With `center` at the attractor the sign gives the rotation sense of the
    converging spiral: positive is counter-clockwise (lower branch),
    negative clockwise (upper branch).
    """
    x = record.values.real - center.real
    y = record.values.imag - center.imag
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))
