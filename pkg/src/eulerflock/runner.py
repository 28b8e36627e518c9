"""Trajectory generation, run summaries, output files and parameter sweeps."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .agents import agents_integrate, empirical_moments, mollify, sample_agents, write_agents_csv
from .diagnostics import (
    CSV_COLUMNS,
    DecayFit,
    DiagnosticsRecord,
    FitDomainError,
    InsufficientDataError,
    decay_window,
    fit_decay,
    flocking_residual,
    measure,
    series,
    threshold_classify,
)
from .dynamics import BlowUp, FieldState, StepControl, stable_dt, step
from .initial_data import make_initial
from .kernels import KernelSpec
from .scenario import Scenario, load_tabulated_initial, serialize_scenario, with_axis
from .spectral import PeriodicGrid, spectral_derivative

SCHEMA_VERSION = 1
OUTPUT_ENV = "EULERFLOCK_OUTPUT_DIR"
EXIT_OK, EXIT_ERROR, EXIT_BLOWUP = 0, 1, 2
FIT_SERIES = ("V", "sup_ux", "sup_uxx", "l2_uxxx", "flock_residual")

# absolute undershoot tolerated in bounded-kernel densities before a run is
# declared under-resolved
NEGATIVE_DENSITY_TOL = 1e-10


@dataclass
class Trajectory:
    grid: PeriodicGrid
    kernel: KernelSpec
    records: list[DiagnosticsRecord]
    densities: list[np.ndarray]
    velocities: list[np.ndarray]
    snapshot_index: list[int]
    final: FieldState
    steps: int = 0
    blowup: BlowUp | None = None
    ubar: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def series(self, name: str) -> np.ndarray:
        return series(self.records, name)


def _check_blowup(state: FieldState, kernel: KernelSpec, grad_limit: float, rho_floor: float):
    ux = float(np.max(np.abs(spectral_derivative(state.grid, state.u, 1))))
    if not ux <= grad_limit:
        raise BlowUp(state.t, "gradient", ux)
    rmin = float(np.min(state.rho))
    if kernel.is_singular:
        if not rmin >= rho_floor:
            raise BlowUp(state.t, "vacuum", rmin)
    elif not rmin >= -NEGATIVE_DENSITY_TOL:
        raise BlowUp(state.t, "negative_density", rmin)


def run(state: FieldState, kernel: KernelSpec, ctl: StepControl, cadence: float, *,
        convention: str = "auto", line_mode: bool = False, eps_supp: float = 1e-4,
        rho_floor: float = 1e-6, blowup_factor: float = 1e3, snapshot_every: int = 1) -> Trajectory:
    """Integrate ``state`` to ``ctl.t_end`` and record diagnostics every ``cadence``.

    The initial data are projected onto the 2/3-rule band first.  Output
    times are hit exactly by shortening the step before each of them.  A
    blow-up ends the run early and is stored on the trajectory, together
    with the diagnostics of the last good output.
    """
    if not cadence > 0:
        raise ValueError(f"output cadence must be positive, got {cadence}")
    state = state.filtered()
    grid = state.grid
    opts = dict(convention=convention, line_mode=line_mode, eps_supp=eps_supp)
    records = [measure(state, kernel, **opts)]
    densities, velocities, snaps = [state.rho.copy()], [state.u.copy()], [0]
    grad_limit = blowup_factor * max(records[0].sup_ux, 1e-6)
    ubar = records[0].P / records[0].M
    nsteps = 0
    blowup = None
    t_end = ctl.t_end
    k_out = 1
    target = min(cadence, t_end)
    tol = 1e-12 * max(1.0, t_end)
    try:
        while state.t < t_end - tol:
            dt = min(stable_dt(state, kernel, ctl), target - state.t)
            state = step(state, kernel, dt)
            nsteps += 1
            if target - state.t <= tol:
                state.t = target
            _check_blowup(state, kernel, grad_limit, rho_floor)
            if state.t == target:
                records.append(measure(state, kernel, **opts))
                densities.append(state.rho.copy())
                velocities.append(state.u.copy())
                if k_out % snapshot_every == 0 or target >= t_end:
                    snaps.append(len(records) - 1)
                k_out += 1
                target = min(k_out * cadence, t_end)
    except BlowUp as exc:
        blowup = exc

    traj = Trajectory(grid, kernel, records, densities, velocities, snaps, state, nsteps, blowup, ubar)
    if blowup is None and len(records) > 1:
        prof = flocking_residual(grid, traj.times, densities, ubar)
        for rec, res in zip(records, prof.residual_series):
            rec.flock_residual = float(res)
    return traj


# --- summaries -----------------------------------------------------------------------

def fit_series(traj: Trajectory, name: str, window=None, skip: float = 0.2) -> DecayFit:
    """Decay fit of one diagnostic column.

    Without an explicit window the measurable part of the series is used
    (see :func:`decay_window`).  The flocking residual ignores ``window``
    and always fits the second half of its measurable part, since its
    reference profile is the last snapshot.
    """
    t, v = traj.times, traj.series(name)
    if window is None or name == "flock_residual":
        window = decay_window(t, v, skip=0.5 if name == "flock_residual" else skip)
    return fit_decay(t, v, window)


def conservation_residuals(traj: Trajectory) -> dict:
    M, P, e = (traj.series(k) for k in ("M", "P", "e_mean"))
    e0 = abs(e[0])
    return {
        "mass_rel": float(np.max(np.abs(M - M[0])) / abs(M[0])),
        "momentum_abs": float(np.max(np.abs(P - P[0]))),
        "e_mean_abs": float(np.max(np.abs(e - e[0]))),
        "e_mean_rel": float(np.max(np.abs(e - e[0])) / e0) if e0 > 0 else None,
    }


def summarize(traj: Trajectory, scenario: Scenario | None = None, fit_window=None,
              fit_skip: float = 0.2) -> dict:
    fits = {}
    for name in FIT_SERIES:
        try:
            fits[name] = fit_series(traj, name, fit_window, fit_skip).as_dict()
        except (FitDomainError, InsufficientDataError, ValueError) as exc:
            fits[name] = {"error": str(exc)}
    out = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "status": "blowup" if traj.blowup else "ok",
        "exit_code": EXIT_BLOWUP if traj.blowup else EXIT_OK,
        "t_final": float(traj.final.t),
        "steps": traj.steps,
        "outputs": len(traj.records),
        "ubar": traj.ubar,
        "fits": fits,
        "conservation": conservation_residuals(traj),
        "blowup": None,
        "threshold": None,
        "initial": _record_dict(traj.records[0]),
        "final": _record_dict(traj.records[-1]),
    }
    if traj.blowup is not None:
        out["blowup"] = {"t": traj.blowup.t, "reason": traj.blowup.reason, "norm": traj.blowup.norm}
    if not traj.kernel.is_singular:
        state0 = FieldState(traj.grid, traj.densities[0], traj.velocities[0], 0.0)
        min_e0, sub = threshold_classify(state0, traj.kernel)
        out["threshold"] = {"min_e0": min_e0, "subcritical": bool(sub)}
    if scenario is not None:
        out["scenario"] = serialize_scenario(scenario)
    return out


def _record_dict(rec: DiagnosticsRecord) -> dict:
    return {c: getattr(rec, c) for c in CSV_COLUMNS}


def _fmt(val) -> str:
    if val is None:
        return ""
    if isinstance(val, float):
        # shortest round-trip repr: at most 17 significant digits
        return repr(val)
    return str(val)


def write_diagnostics_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow([_fmt(v) for v in rec.row()])


def write_snapshots(directory: Path, traj: Trajectory, formats) -> list[Path]:
    paths = []
    idx = traj.snapshot_index
    x = traj.grid.x
    if "csv" in formats:
        p = directory / "snapshots.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "rho", "u"])
            for i in idx:
                t = repr(float(traj.records[i].t))
                for xj, rj, uj in zip(x, traj.densities[i], traj.velocities[i]):
                    w.writerow([t, repr(float(xj)), repr(float(rj)), repr(float(uj))])
        paths.append(p)
    if "npz" in formats:
        p = directory / "snapshots.npz"
        np.savez(p, t=np.array([traj.records[i].t for i in idx]), x=x,
                 rho=np.array([traj.densities[i] for i in idx]),
                 u=np.array([traj.velocities[i] for i in idx]))
        paths.append(p)
    return paths


# --- scenarios -----------------------------------------------------------------------

def initial_state(s: Scenario) -> FieldState:
    grid = PeriodicGrid(s.n, s.L)
    if s.initial_name == "tabulated":
        rho, u = load_tabulated_initial(s.initial_params["path"], s.n)
    else:
        rho, u = make_initial(grid, s.initial_name, **s.initial_params)
    return FieldState(grid, rho, u, 0.0)


def simulate(s: Scenario) -> Trajectory:
    ctl = StepControl(s.cfl_advective, s.cfl_dissipative, s.dt_max, s.t_end)
    return run(initial_state(s), s.kernel(), ctl, s.cadence, convention=s.e_convention,
               line_mode=s.mode == "line_emulation", eps_supp=s.eps_supp, rho_floor=s.rho_floor,
               blowup_factor=s.blowup_factor, snapshot_every=s.snapshot_every)


def run_agents(s: Scenario, traj: Trajectory) -> tuple[dict, list]:
    """Particle run sampled from the same initial data, compared with the PDE at its final time."""
    a = s.agents
    grid = traj.grid
    rho0, u0 = traj.densities[0], traj.velocities[0]
    mass = grid.L * float(np.mean(rho0))
    agents0 = sample_agents(grid, rho0 / np.mean(rho0), u0, a["N"], a["seed"])
    every = max(1, round(s.cadence / a["dt"]))
    final, history = agents_integrate(agents0, s.kernel(), a["dt"], traj.final.t, a["normalization"],
                                      mass, record_every=every)
    rho_emp, _ = empirical_moments(final, grid, a["mollifier_width"])
    # the particle density has unit mean; compare against the normalized, equally mollified PDE density
    rho_pde = mollify(grid, traj.final.rho / np.mean(traj.final.rho), a["mollifier_width"])
    l1 = float(grid.dx * np.sum(np.abs(rho_emp - rho_pde)))
    return {"N": a["N"], "seed": a["seed"], "t": float(final.t), "l1_density": l1,
            "velocity_diameter": final.velocity_diameter()}, history


@dataclass
class RunResult:
    exit_code: int
    directory: Path
    summary: dict
    trajectory: Trajectory | None = None
    files: list = field(default_factory=list)


def output_directory(s: Scenario, override=None) -> Path:
    return Path(override or os.environ.get(OUTPUT_ENV) or s.directory)


def run_scenario(s: Scenario, directory=None) -> RunResult:
    """Run ``s`` and write ``diagnostics.csv``, snapshots and ``summary.json``.

    Exit codes: 0 clean finish, 2 detected blow-up.  I/O failures raise
    ``OSError`` naming the path.
    """
    out = output_directory(s, directory)
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate(s)
    summary = summarize(traj, s, s.fit_window, s.fit_skip)
    files = [out / "diagnostics.csv"]
    write_diagnostics_csv(files[0], traj.records)
    files += write_snapshots(out, traj, s.formats)
    if s.agents is not None and traj.blowup is None:
        summary["agents"], history = run_agents(s, traj)
        files.append(out / "agents.csv")
        write_agents_csv(files[-1], history)
    files.append(out / "summary.json")
    with open(files[-1], "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return RunResult(summary["exit_code"], out, summary, traj, files)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return _jsonable(obj.item())
    return obj


SWEEP_COLUMNS = ("value", "status", "exit_code", "t_final", "delta_V", "r2_V", "delta_sup_ux",
                 "r2_sup_ux", "delta_flock_residual", "r2_flock_residual", "mass_rel",
                 "momentum_abs", "e_mean_abs", "min_e0")


def sweep_row(value, summary: dict) -> dict:
    row = {"value": value, "status": summary["status"], "exit_code": summary["exit_code"],
           "t_final": summary["t_final"]}
    for name in ("V", "sup_ux", "flock_residual"):
        fit = summary["fits"].get(name, {})
        row[f"delta_{name}"] = fit.get("delta")
        row[f"r2_{name}"] = fit.get("r_squared")
    row.update({k: summary["conservation"][k] for k in ("mass_rel", "momentum_abs", "e_mean_abs")})
    row["min_e0"] = summary["threshold"]["min_e0"] if summary["threshold"] else None
    return row


def run_sweep(template: Scenario, axis: str, values, directory=None) -> tuple[Path, list[dict]]:
    """One run per value of ``axis`` (rows sorted by value), each in its own subdirectory.

    The aggregate ``sweep.csv`` holds the headline fits and conservation
    residuals and is written once, after all runs.
    """
    scenarios = [(v, with_axis(template, axis, v)) for v in sorted(values)]
    base = output_directory(template, directory)
    base.mkdir(parents=True, exist_ok=True)
    rows = []
    for v, s in scenarios:
        res = run_scenario(s, base / f"{axis}={_fmt(v)}")
        rows.append(sweep_row(v, res.summary))
    path = base / "sweep.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["axis", *SWEEP_COLUMNS])
        for row in rows:
            w.writerow([axis, *(_fmt(row[c]) for c in SWEEP_COLUMNS)])
    return path, rows
