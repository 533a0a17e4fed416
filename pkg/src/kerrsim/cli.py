"""Configuration-driven runner that turns solver routes into data products.

Subcommands: steady, dynamics, wigner, spectrum, selfcheck.  Each run
resolves a config (JSON file, overridden by flags), stamps every output
file with a header block (artifact version, config hash, parameter echo),
and writes deterministic CSV: same config + seed means byte-identical
output.  Plotting is left to the demo scripts; the CLI emits data only.

Sweep points are independent; set KERRSIM_WORKERS > 1 to dispatch them to
a thread pool (results are gathered and written in sweep order either way).
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from importlib.metadata import PackageNotFoundError, version

from . import chain_map, exact_steady, lindblad, semiclassical, spectra, tebd, wigner

try:
    _pkg_version = version("kerrsim")
except PackageNotFoundError:  # running from a source tree without install
    _pkg_version = "0.0.0+src"
from .errors import KerrSimError, VacuumG2Undefined
from .model import BathSpec, InitialState, KerrParams

__all__ = ["RunConfig", "PRESETS", "main", "run_selfcheck"]

SOLVERS = ("semiclassical", "lindblad", "exact", "tebd")

# Pinned parameter sets.  "paper" is the full-size working point; "desk" is
# the reduced set used by the automated test suite.  The bath cutoff scales
# with the chain length so that signals cannot wrap around the far end of
# the chain within t_end.
PRESETS = {
    "paper": dict(n_chain=61, omega_c=60.0, chi_max=36, chain_dim=20,
                  system_dim=20, dt=1e-2, t_end=2.0),
    "desk": dict(n_chain=31, omega_c=30.0, chi_max=16, chain_dim=10,
                 system_dim=20, dt=1e-2, t_end=2.0),
}


@dataclass
class RunConfig:
    """Fully resolved run description; hashable into the output headers."""

    params: KerrParams = field(default_factory=KerrParams)
    initial: InitialState = field(default_factory=InitialState)
    solver: str = "semiclassical"
    preset: str = "desk"
    seed: int = 1234
    output_dir: Path = Path("out")
    sweep_field: str | None = None
    sweep_values: tuple = ()
    lindblad_dim: int = 40
    # tensor-network knobs (preset-pinned unless overridden)
    n_chain: int = 31
    omega_c: float = 30.0
    chi_max: int = 16
    chain_dim: int = 10
    system_dim: int = 20
    dt: float = 1e-2
    t_end: float = 2.0
    # spectrum estimator knobs
    n_omega: int = 512
    n_theta: int = 64
    langevin_t_end: float = 200.0
    langevin_n_traj: int = 16
    tau_max: float = 0.64
    # phase-space knobs
    wigner_points: int = 201
    lobe_threshold: float = 0.5

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.preset not in (*PRESETS, "custom"):
            raise ValueError(f"preset must be one of {(*PRESETS, 'custom')}, got {self.preset!r}")
        self.output_dir = Path(self.output_dir)

    def bath(self) -> BathSpec:
        return BathSpec.for_gamma(self.params.gamma, self.omega_c, self.n_chain)

    def drives(self) -> list:
        if self.sweep_field is None:
            return [abs(self.params.drive)]
        if self.sweep_field != "drive":
            raise ValueError(f"only 'drive' sweeps are supported, got {self.sweep_field!r}")
        return [float(v) for v in self.sweep_values]

    def as_dict(self) -> dict:
        return {
            "params": {
                "delta": self.params.delta, "chi2": self.params.chi2,
                "gamma": self.params.gamma,
                "drive": [self.params.drive.real, self.params.drive.imag],
            },
            "initial": {"amplitude": self.initial.amplitude, "phase": self.initial.phase},
            "solver": self.solver, "preset": self.preset, "seed": self.seed,
            "sweep": {"field": self.sweep_field, "values": list(self.sweep_values)},
            "lindblad_dim": self.lindblad_dim,
            "tebd": {
                "n_chain": self.n_chain, "omega_c": self.omega_c,
                "chi_max": self.chi_max, "chain_dim": self.chain_dim,
                "system_dim": self.system_dim, "dt": self.dt, "t_end": self.t_end,
            },
            "spectrum": {
                "n_omega": self.n_omega, "n_theta": self.n_theta,
                "langevin_t_end": self.langevin_t_end,
                "langevin_n_traj": self.langevin_n_traj, "tau_max": self.tau_max,
            },
            "wigner": {"points": self.wigner_points, "lobe_threshold": self.lobe_threshold},
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _apply_preset(cfg_kwargs: dict, preset: str):
    if preset in PRESETS:
        for key, value in PRESETS[preset].items():
            cfg_kwargs[key] = value


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Resolve file values, then preset pins, then explicit flag overrides."""
    raw = {}
    if path is not None:
        with open(path) as fh:
            raw = json.load(fh)

    kwargs: dict = {}
    pr = raw.get("params", {})
    drive = pr.get("drive", 0.0)
    if isinstance(drive, (list, tuple)):
        drive = complex(drive[0], drive[1])
    kwargs["params"] = KerrParams(
        delta=float(pr.get("delta", -12.0)),
        chi2=float(pr.get("chi2", 1.5)),
        gamma=float(pr.get("gamma", 6.28)),
        drive=complex(drive),
    )
    ini = raw.get("initial", {})
    kwargs["initial"] = InitialState(
        amplitude=float(ini.get("amplitude", 0.0)),
        phase=float(ini.get("phase", 0.0)),
    )
    sweep = raw.get("sweep") or {}
    kwargs["sweep_field"] = sweep.get("field")
    kwargs["sweep_values"] = tuple(sweep.get("values", ()))
    for key in ("solver", "seed", "lindblad_dim"):
        if key in raw:
            kwargs[key] = raw[key]
    if "output_dir" in raw:
        kwargs["output_dir"] = Path(raw["output_dir"])

    preset = overrides.get("preset") or raw.get("preset", "desk")
    kwargs["preset"] = preset
    _apply_preset(kwargs, preset)
    for section in ("tebd", "spectrum", "wigner"):
        for key, value in (raw.get(section) or {}).items():
            mapped = {"points": "wigner_points"}.get(key, key)
            kwargs[mapped] = value

    for key, value in overrides.items():
        if value is None or key == "preset":
            continue
        kwargs[key] = value
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# CSV plumbing


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def _header_lines(config: RunConfig, extra: dict | None = None) -> list:
    lines = [
        f"# artifact: kerrsim {_pkg_version}",
        f"# config_hash: {config.config_hash()}",
        f"# preset: {config.preset}",
        f"# solver: {config.solver}",
        f"# delta: {_fmt(config.params.delta)}",
        f"# chi2: {_fmt(config.params.chi2)}",
        f"# gamma: {_fmt(config.params.gamma)}",
        f"# drive: {_fmt(config.params.drive.real)}{config.params.drive.imag:+.12g}j",
        f"# initial: [{_fmt(config.initial.amplitude)}, {_fmt(config.initial.phase)}]",
        f"# seed: {config.seed}",
    ]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}: {val}")
    return lines


def _write_csv(path: Path, header: list, columns: list, rows: list):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = list(header)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _map_over_sweep(items, worker):
    n_workers = int(os.environ.get("KERRSIM_WORKERS", "1"))
    if n_workers <= 1:
        return [worker(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, items))


# ---------------------------------------------------------------------------
# steady


def _steady_rows_for_drive(config: RunConfig, e_value: float) -> list:
    p = config.params.with_drive(e_value)
    rows = []
    try:
        if config.solver == "semiclassical":
            for pt in semiclassical.steady_states(p):
                rows.append([e_value, config.solver, abs(pt.alpha),
                             cmath.phase(pt.alpha), pt.n, 1.0, pt.branch.value, "ok"])
        elif config.solver == "exact":
            mean = exact_steady.mean_field(p)
            rows.append([e_value, config.solver, abs(mean), cmath.phase(mean),
                         exact_steady.mean_photon(p), exact_steady.g2_zero(p), "na", "ok"])
        elif config.solver == "lindblad":
            state = lindblad.steady_state(p, config.lindblad_dim)
            try:
                mean, n, g2 = lindblad.expectations(state)
            except VacuumG2Undefined:
                mean = complex(np.trace(state.rho @ lindblad.destroy(state.dim)))
                n, g2 = 0.0, float("nan")
            rows.append([e_value, config.solver, abs(mean), cmath.phase(mean),
                         n, g2, "na", "ok"])
        elif config.solver == "tebd":
            records, _ = _tebd_run(config, p)
            mean = records["a"].values[-1]
            rows.append([e_value, config.solver, abs(mean), cmath.phase(mean),
                         records["n"].values[-1].real, records["g2"].values[-1].real,
                         "na", "ok"])
    except (KerrSimError, ValueError) as exc:
        rows.append([e_value, config.solver, float("nan"), float("nan"),
                     float("nan"), float("nan"), "na", type(exc).__name__])
    return rows


def run_steady_sweep(config: RunConfig) -> Path:
    """One row per (drive, branch): E, solver, |a|, arg(a), n, g2, branch, status."""
    chunks = _map_over_sweep(config.drives(), lambda e: _steady_rows_for_drive(config, e))
    rows = [row for chunk in chunks for row in chunk]
    path = config.output_dir / "steady.csv"
    _write_csv(path, _header_lines(config),
               ["E", "solver", "abs_a", "arg_a", "n", "g2", "branch", "status"], rows)
    return path


# ---------------------------------------------------------------------------
# dynamics


def _tebd_run(config: RunConfig, p: KerrParams):
    bath = config.bath()
    coeffs = chain_map.chain_coefficients(bath)
    state = tebd.init_state(p, config.initial, (config.system_dim, config.chain_dim),
                            config.n_chain, chi_max=config.chi_max)
    return tebd.evolve(state, p, coeffs, config.dt, config.t_end)


def run_dynamics(config: RunConfig) -> Path:
    """Time series t, Re a, Im a, n, g2 for the configured solver."""
    p = config.params
    alpha0 = config.initial.alpha
    if config.solver == "semiclassical":
        rec = semiclassical.evolve_euler(p, alpha0, config.dt, config.t_end)
        rows = [[t, v.real, v.imag, abs(v) ** 2, 1.0]
                for t, v in zip(rec.times, rec.values)]
    elif config.solver == "lindblad":
        rho0 = lindblad.coherent_dm(alpha0, config.lindblad_dim)
        times, states = lindblad.evolve_master(rho0, p, config.dt, config.t_end)
        rows = []
        for t, state in zip(times, states):
            try:
                mean, n, g2 = lindblad.expectations(state)
            except VacuumG2Undefined:
                mean, n, g2 = 0.0 + 0.0j, 0.0, 0.0
            rows.append([t, mean.real, mean.imag, n, g2])
    elif config.solver == "tebd":
        records, _ = _tebd_run(config, p)
        rows = [[t, a.real, a.imag, n.real, g2.real]
                for t, a, n, g2 in zip(records["a"].times, records["a"].values,
                                       records["n"].values, records["g2"].values)]
    else:
        raise ValueError("the exact solver provides steady states only, not dynamics")
    path = config.output_dir / "dynamics.csv"
    _write_csv(path, _header_lines(config), ["t", "re_a", "im_a", "n", "g2"], rows)
    return path


# ---------------------------------------------------------------------------
# wigner


def run_wigner(config: RunConfig) -> list:
    """Phase-space matrix dump per drive plus one lobe-location summary."""
    if config.solver not in ("lindblad", "tebd"):
        raise ValueError("phase-space maps need a density-matrix route: lindblad or tebd")
    paths = []
    lobe_rows = []
    for e_value in config.drives():
        p = config.params.with_drive(e_value)
        if config.solver == "lindblad":
            rho = lindblad.steady_state(p, config.lindblad_dim)
        else:
            bath = config.bath()
            coeffs = chain_map.chain_coefficients(bath)
            state = tebd.init_state(p, config.initial,
                                    (config.system_dim, config.chain_dim),
                                    config.n_chain, chi_max=config.chi_max)
            tebd.evolve(state, p, coeffs, config.dt, config.t_end)
            rho = tebd.reduced_density_matrix(state, 0)
        a_op = lindblad.destroy(rho.dim)
        n_mean = float(np.real(np.trace(rho.rho @ a_op.conj().T @ a_op)))
        half_width = max(2.0 * math.sqrt(n_mean + 1.0), 3.0)
        fld = wigner.wigner_from_density(rho, half_width, config.wigner_points)
        path = config.output_dir / f"wigner_E{_fmt(e_value)}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        fld.to_csv(path, {"config_hash": config.config_hash(), "E": _fmt(e_value),
                          "solver": config.solver})
        paths.append(path)
        for lobe in wigner.lobe_locations(fld, config.lobe_threshold):
            lobe_rows.append([e_value, lobe.real, lobe.imag, abs(lobe)])
    lobe_path = config.output_dir / "wigner_lobes.csv"
    _write_csv(lobe_path, _header_lines(config), ["E", "re_beta", "im_beta", "abs_beta"],
               lobe_rows)
    paths.append(lobe_path)
    return paths


# ---------------------------------------------------------------------------
# spectra


def _semiclassical_alpha(p: KerrParams, initial: InitialState) -> complex:
    """Stable branch root selected by the initial state's basin."""
    rec = semiclassical.evolve_euler(p, initial.alpha, 1e-2, 6.0)
    final = rec.values[-1]
    stable = [pt for pt in semiclassical.steady_states(p) if pt.stable]
    return min(stable, key=lambda pt: abs(pt.alpha - final)).alpha


def run_spectra(config: RunConfig) -> list:
    """Analytic spectra for both working amplitudes, plus the numeric route
    selected by the solver (semiclassical -> stochastic trajectories,
    tebd -> two-time correlators).  All outputs are unit-peak normalized;
    the raw peak value is recorded in the header."""
    paths = []
    for e_value in config.drives():
        p = config.params.with_drive(e_value)
        omega_grid = np.linspace(-3.0 * max(abs(p.delta), 1.0),
                                 3.0 * max(abs(p.delta), 1.0), config.n_omega)
        theta_grid = np.linspace(0.0, math.pi, config.n_theta, endpoint=False)

        produced = []
        alpha_sc = _semiclassical_alpha(p, config.initial)
        produced.append(spectra.analytic_spectrum(
            p, alpha_sc, omega_grid, theta_grid, "analytic_semiclassical"))
        if p.chi2 != 0.0 and abs(p.drive.imag) < 1e-12:
            alpha_q = exact_steady.mean_field(p)
            produced.append(spectra.analytic_spectrum(
                p, alpha_q, omega_grid, theta_grid, "analytic_quantum_alpha"))

        if config.solver == "semiclassical":
            trajs = semiclassical.evolve_euler_maruyama(
                p, alpha_sc, config.dt, config.langevin_t_end,
                seed=config.seed, n_traj=config.langevin_n_traj)
            produced.append(spectra.numeric_spectrum_langevin(trajs, theta_grid))
        elif config.solver == "tebd":
            bath = config.bath()
            coeffs = chain_map.chain_coefficients(bath)
            state = tebd.init_state(p, config.initial,
                                    (config.system_dim, config.chain_dim),
                                    config.n_chain, chi_max=config.chi_max)
            # anchor the correlators at t_end - tau_max so the whole
            # correlation window stays inside the chain's clean horizon
            settle = max(config.t_end - config.tau_max, config.dt)
            tebd.evolve(state, p, coeffs, config.dt, settle)
            correl = tebd.collect_correlators(state, p, coeffs, config.dt,
                                              config.tau_max, check_stationary=False)
            produced.append(spectra.numeric_spectrum_tebd(correl, theta_grid, omega_grid))

        for result in produced:
            raw_peak = float(np.max(np.abs(result.values)))
            normalized = result.unit_peak()
            path = config.output_dir / f"spectrum_{result.provenance}_E{_fmt(e_value)}.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            normalized.to_csv(path, {
                "config_hash": config.config_hash(), "E": _fmt(e_value),
                "raw_peak": _fmt(raw_peak), "normalization": "unit_peak",
            })
            paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# selfcheck


def _check_spectral_density() -> tuple:
    bath = BathSpec.for_gamma(6.28, 60.0, 61)
    from .model import spectral_density
    from scipy.integrate import quad
    even = all(
        spectral_density(w, bath) == spectral_density(-w, bath)
        for w in (0.0, 1.0, 30.0, 59.9, 60.0, 61.0)
    )
    val, _ = quad(lambda w: spectral_density(w, bath), -bath.omega_c, bath.omega_c,
                  limit=200)
    integral_ok = abs(val - bath.gamma * bath.omega_c) <= 1e-10 * bath.gamma * bath.omega_c
    return even and integral_ok, f"window integral dev {abs(val - bath.gamma * bath.omega_c):.2e}"


def _check_branch_residuals() -> tuple:
    p = KerrParams(drive=8.0)
    from .model import eom_rhs
    pts = semiclassical.steady_states(p)
    resid = max(abs(eom_rhs(pt.alpha, p)) for pt in pts)
    ok = len(pts) == 3 and resid < 1e-10 and not pts[1].stable
    return ok, f"3 roots, max residual {resid:.2e}, middle unstable={not pts[1].stable}"


def _check_turning_points() -> tuple:
    p = KerrParams()
    n_l, n_u = semiclassical.turning_points(p)
    drive_sq = lambda n: n * ((p.delta + 2 * p.chi2 * n) ** 2 + p.gamma**2 / 4)
    eps = 1e-6
    dev = max(abs(drive_sq(n + eps) - drive_sq(n - eps)) / (2 * eps) for n in (n_l, n_u))
    return dev < 1e-6, f"extremum slope {dev:.2e}"


def _check_hyper_series() -> tuple:
    import math as _m
    direct = sum(1.0 / _m.factorial(k) ** 3 for k in range(25))
    val = exact_steady.hyper0f2(1.0, 1.0, 1.0)
    dev = abs(val - direct) / direct
    return dev < 1e-13, f"0F2(1,1;1) rel dev {dev:.2e}"


def _check_exact_vs_master() -> tuple:
    p = KerrParams(drive=10.0)
    state = lindblad.steady_state(p, 35)
    mean, _n, g2 = lindblad.expectations(state)
    dev1 = abs(abs(exact_steady.mean_field(p)) - abs(mean)) / abs(mean)
    dev2 = abs(exact_steady.g2_zero(p) - g2) / g2
    return max(dev1, dev2) < 1e-6, f"|<a>| rel dev {dev1:.2e}, g2 rel dev {dev2:.2e}"


def _check_trace_preservation() -> tuple:
    p = KerrParams(drive=3.0)
    liou = lindblad.build_liouvillian(p, 12)
    trace_vec = np.zeros(144)
    trace_vec[np.arange(12) * 13] = 1.0
    resid = float(np.max(np.abs(trace_vec @ liou)))
    return resid < 1e-12, f"left trace-null residual {resid:.2e}"


def _check_chain_orthonormality() -> tuple:
    dev = chain_map.unitary_orthonormality_check(10, 64)
    return dev < 1e-12, f"orthonormality dev {dev:.2e}"


def _check_chain_vs_lanczos() -> tuple:
    bath = BathSpec.for_gamma(6.28, 60.0, 40)
    coeffs = chain_map.chain_coefficients(bath)
    freqs, coups = chain_map.discretized_band(bath, 160)
    norm0, _alphas, betas = chain_map.lanczos_tridiagonalize(freqs, coups, 21)
    dev = max(abs(norm0 - coeffs.eta_prime),
              float(np.max(np.abs(betas[:20] - coeffs.etas[:20]))))
    return dev < 1e-8, f"closed form vs recurrence dev {dev:.2e}"


def _check_gate_unitarity() -> tuple:
    p = KerrParams(drive=1.0)
    bath = BathSpec.for_gamma(p.gamma, 10.0, 4)
    coeffs = chain_map.chain_coefficients(bath)
    gates = tebd.build_gates(p, coeffs, 1e-2, (6, 4))
    worst = 0.0
    for _bond, gate in gates.odd_gates + gates.even_gates + gates.half_step_odd:
        d = gate.shape[0] * gate.shape[1]
        mat = gate.reshape(d, d)
        worst = max(worst, float(np.max(np.abs(mat.conj().T @ mat - np.eye(d)))))
    return worst < 1e-12, f"unitarity residual {worst:.2e}"


def _check_tebd_norm() -> tuple:
    p = KerrParams(drive=1.0)
    bath = BathSpec.for_gamma(p.gamma, 10.0, 4)
    coeffs = chain_map.chain_coefficients(bath)
    state = tebd.init_state(p, InitialState(), (6, 4), 4, chi_max=8)
    gates = tebd.build_gates(p, coeffs, 1e-2, (6, 4))
    for _ in range(10):
        tebd.step(state, gates)
    dev = abs(state.norm_squared() - 1.0)
    return dev < 1e-8, f"norm drift {dev:.2e} after 10 steps"


def _check_wigner_vacuum() -> tuple:
    rho = lindblad.fock_dm(0, 12)
    fld = wigner.wigner_from_density(rho, 4.0, 101)
    peak = fld.values[50, 50]
    ok = (abs(fld.integral() - 1.0) < 1e-3
          and abs(peak - 2.0 / math.pi) < 1e-6
          and abs(fld.purity_integral() - 1.0) < 2e-3)
    return ok, f"integral {fld.integral():.6f}, peak {peak:.6f}"


def _check_pole_structure() -> tuple:
    p = KerrParams()
    n_low, n_high = spectra.splitting_bounds(p)
    dev = max(abs(spectra.pole_radicand(p, n_low)), abs(spectra.pole_radicand(p, n_high)))
    n_l, n_u = semiclassical.turning_points(p)
    inside = n_low < n_l and n_u < n_high
    co = spectra.linearized_coefficients(p, 1.2 + 0.3j, 2.7)
    co_m = spectra.linearized_coefficients(p, 1.2 + 0.3j, -2.7)
    conj_ok = abs(co_m.a_coef - co.c_coef.conjugate()) < 1e-14
    return dev < 1e-10 and inside and conj_ok, (
        f"radicand dev {dev:.2e}, turning points inside no-splitting interval: {inside}"
    )


SELFCHECKS = [
    ("spectral_density_window", _check_spectral_density),
    ("steady_state_residuals", _check_branch_residuals),
    ("turning_points_extrema", _check_turning_points),
    ("hypergeometric_series", _check_hyper_series),
    ("exact_vs_master_equation", _check_exact_vs_master),
    ("liouvillian_trace_preservation", _check_trace_preservation),
    ("chain_orthonormality", _check_chain_orthonormality),
    ("chain_vs_lanczos_recurrence", _check_chain_vs_lanczos),
    ("trotter_gate_unitarity", _check_gate_unitarity),
    ("tebd_norm_preservation", _check_tebd_norm),
    ("wigner_vacuum_normalization", _check_wigner_vacuum),
    ("pole_and_splitting_structure", _check_pole_structure),
]


def run_selfcheck(checks=None, stream=None) -> int:
    """Run the per-module invariant suite; returns the number of failures."""
    stream = stream or sys.stdout
    failures = 0
    for name, fn in (checks or SELFCHECKS):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status} {name}: {detail}", file=stream)
    print(f"{len(checks or SELFCHECKS) - failures}/{len(checks or SELFCHECKS)} checks passed",
          file=stream)
    return failures


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file")
    shared.add_argument("--out", help="output directory")
    shared.add_argument("--seed", type=int, help="RNG seed")
    shared.add_argument("--preset", choices=(*PRESETS, "custom"), help="pinned parameter set")
    shared.add_argument("--solver", choices=SOLVERS, help="solution route")
    shared.add_argument("--drive", type=float, help="drive amplitude (overrides config)")
    shared.add_argument("--sweep", help="comma-separated drive values, e.g. 1,2,...,20")

    parser = argparse.ArgumentParser(prog="kerrsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in [
        ("steady", "steady-state sweep"),
        ("dynamics", "time evolution of the field"),
        ("wigner", "phase-space maps"),
        ("spectrum", "quadrature fluctuation spectra"),
        ("selfcheck", "run the invariant suite"),
    ]:
        sub.add_parser(name, parents=[shared], help=descr)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "selfcheck":
        return 1 if run_selfcheck() else 0

    overrides: dict = {}
    if args.out:
        overrides["output_dir"] = Path(args.out)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.solver:
        overrides["solver"] = args.solver
    if args.preset:
        overrides["preset"] = args.preset
    if args.drive is not None:
        overrides["params_drive"] = args.drive
    if args.sweep:
        overrides["sweep_field"] = "drive"
        overrides["sweep_values"] = tuple(float(v) for v in args.sweep.split(","))

    try:
        drive_override = overrides.pop("params_drive", None)
        config = load_config(args.config, overrides)
        if drive_override is not None:
            config.params = config.params.with_drive(drive_override)
        runner = {
            "steady": run_steady_sweep,
            "dynamics": run_dynamics,
            "wigner": run_wigner,
            "spectrum": run_spectra,
        }[args.command]
        result = runner(config)
        for path in result if isinstance(result, list) else [result]:
            print(path)
        return 0
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error_category=InvalidConfig: {exc}", file=sys.stderr)
        return 2
    except KerrSimError as exc:
        print(f"error_category={type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
