"""Subcommand implementations.

Every command takes a resolved :class:`RunConfig` and a :class:`RunManifest`,
writes its outputs through the manifest and returns an exit status
(``EXIT_OK`` or ``EXIT_PARTIAL``).  Numerical failures that prevent any
useful output propagate as exceptions and are mapped to exit codes by the
entry point.
"""

from __future__ import annotations

import math

import numpy as np

from ..core_model import SystemParams, make_tf_state
from ..dgpe import (TIMESERIES_COLUMNS, RampProtocol, SimGrid, branch_comparison, ground_state,
                    moments, paraboloid_residual, run_ramp, save_snapshot, z0_slices)
from ..errors import DomainError, NotFoundError, RotBecError
from ..stability import instability_timescale, spectrum, stability_map
from ..tf_solver import (eps_continuation, find_bifurcation, kappa_perp, omega_branches,
                         residuals_of, solve_on_eps_branch, time_averaged_kappa)
from .config import ConfigError, RunConfig, expand_values
from .output import csv_bytes, matrix_csv_bytes, pgm_bytes

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4

BRANCH_COLUMNS = ("Omega", "kappa_x", "kappa_y", "alpha", "Rz", "mu", "residual_max", "error")
BIFURCATION_COLUMNS = ("gamma", "eps_dd", "Omega_b", "error")
TIMEAVG_COLUMNS = ("gamma", "eps_dd", "kappa_perp_at_Omega50", "kappa_par_mapped", "abs_diff",
                   "error")
SPECTRUM_COLUMNS = ("re", "im", "mode_order")
SPECTRUM_SUMMARY_COLUMNS = ("Omega", "eps_dd", "gamma", "N_max", "lambda0", "instability_cycles",
                            "kappa_x", "kappa_y", "alpha", "n_eigs")
MAP_COLUMNS = ("Omega", "eps_dd", "lambda0", "lambda0_quarter", "kappa_x", "kappa_y", "alpha",
               "error")
GROUND_COLUMNS = ("mu", "energy", "kinetic", "trap", "contact", "dipolar", "lz", "x2", "y2", "z2",
                  "Rz_from_z2", "mu_tf", "Rz_tf", "iterations", "imaginary_time", "converged")
COMPARISON_COLUMNS = ("t", "eps_dd", "alpha_est", "alpha_tf", "abs_diff")

DEFAULT_TIMEAVG_GAMMAS = (0.5, 1.0, 2.0)
DEFAULT_TIMEAVG_EPS = {"start": 0.0, "stop": 0.9, "num": 10}


def system_params(cfg: RunConfig) -> SystemParams:
    try:
        return SystemParams(**cfg["params"])
    except (TypeError, DomainError) as exc:
        raise ConfigError(f"invalid params: {exc}") from exc


def _sim_grid(cfg: RunConfig) -> SimGrid:
    g = cfg["grid"]
    try:
        return SimGrid(int(g["n"]), float(g["d"]), None if g.get("rc") is None else float(g["rc"]))
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"invalid grid block: {exc}") from exc


def _tag(v: float) -> str:
    return format(float(v), "g")


# ---------------------------------------------------------------- TF tasks

def cmd_tf_branches(cfg: RunConfig, manifest) -> int:
    """One CSV per stationary branch over the Omega grid."""
    params = system_params(cfg)
    omegas = expand_values(cfg.get("omega_values"), "omega_values")
    if any(w < 0 for w in omegas):
        raise ConfigError("omega_values must be non-negative")
    omegas = sorted(set(omegas))
    try:
        branches = omega_branches(params, omegas)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    diag = []
    for br in branches:
        rows = []
        have = {v: (s, r) for (v, s), r in zip(br.samples, br.residuals)}
        start = br.samples[0][0] if br.samples else math.inf
        for w in omegas:
            if w < start:
                continue
            if w in have:
                s, r = have[w]
                rows.append((w, s.kappa_x, s.kappa_y, s.alpha, s.r_z, s.mu, r, ""))
            else:
                rows.append((w, None, None, None, None, None, None,
                             f"branch terminated at Omega={br.terminated_at:.8g}: "
                             f"{br.termination_reason}"))
        manifest.add_bytes(f"branch_{br.branch_id}.csv", csv_bytes(BRANCH_COLUMNS, rows))
        diag.append({"branch_id": br.branch_id, "points": len(br.samples),
                     "terminated_at": br.terminated_at, "reason": br.termination_reason,
                     "residual_max": max(br.residuals) if br.residuals else None})
    manifest.diagnostics["branches"] = diag
    return EXIT_OK


def cmd_tf_bifurcation(cfg: RunConfig, manifest) -> int:
    """Omega_b for every (gamma, eps_dd) pair requested."""
    params = system_params(cfg)
    gammas = expand_values(cfg.get("gamma_values", params.gamma), "gamma_values")
    eps = expand_values(cfg.get("eps_values", params.eps_dd), "eps_values")
    rows, failed = [], 0
    for g in gammas:
        for e in eps:
            try:
                rows.append((g, e, find_bifurcation(e, g), ""))
            except (NotFoundError, DomainError) as exc:
                failed += 1
                rows.append((g, e, None, f"{type(exc).__name__}: {exc}"))
    manifest.add_bytes("bifurcation.csv", csv_bytes(BIFURCATION_COLUMNS, rows))
    manifest.diagnostics["failed_points"] = failed
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_timeavg_compare(cfg: RunConfig, manifest) -> int:
    """Fast-rotation aspect ratio against the time-averaged model with eps -> -eps/2."""
    params = system_params(cfg)
    gammas = expand_values(cfg.get("gamma_values", list(DEFAULT_TIMEAVG_GAMMAS)), "gamma_values")
    eps = expand_values(cfg.get("eps_values", DEFAULT_TIMEAVG_EPS), "eps_values")
    if any(not 0.0 <= e < 1.0 for e in eps):
        raise ConfigError("eps_values must lie in [0, 1)")
    om = float(cfg["omega_high"])
    rows, failed, worst = [], 0, 0.0
    for g in gammas:
        base = params.with_(gamma=g, omega=om, eps_dd=0.0)
        curve = eps_continuation(base, sorted(set(eps)))
        found = dict(curve.samples)
        for e in eps:
            st = found.get(e)
            try:
                if st is None:
                    raise NotFoundError(f"no fast-rotation state (branch terminated at "
                                        f"eps_dd={curve.terminated_at})")
                kp = kappa_perp(st.kappa_x, st.kappa_y)
                kpar = time_averaged_kappa(-0.5 * e, g)
            except RotBecError as exc:
                failed += 1
                rows.append((g, e, None, None, None, f"{type(exc).__name__}: {exc}"))
                continue
            diff = abs(kp - kpar)
            worst = max(worst, diff)
            rows.append((g, e, kp, kpar, diff, ""))
    manifest.add_bytes("timeavg.csv", csv_bytes(TIMEAVG_COLUMNS, rows))
    manifest.diagnostics.update({"max_abs_diff": worst, "failed_points": failed,
                                 "omega_high": om})
    return EXIT_PARTIAL if failed else EXIT_OK


# --------------------------------------------------------- stability tasks

def cmd_stability_spectrum(cfg: RunConfig, manifest) -> int:
    """Full eigenvalue list at one parameter point on the eps-continued branch."""
    params = system_params(cfg)
    n_max = int(cfg["n_max"])
    tf = solve_on_eps_branch(params)
    sp = spectrum(tf, params, n_max, vectors=True)
    order = np.lexsort((sp.eigenvalues.imag, -sp.eigenvalues.real))
    rows = [(sp.eigenvalues[i].real, sp.eigenvalues[i].imag, int(sp.mode_order[i])) for i in order]
    manifest.add_bytes("spectrum.csv", csv_bytes(SPECTRUM_COLUMNS, rows))
    cycles = instability_timescale(sp.lambda0, params.omega)
    summary = (params.omega, params.eps_dd, params.gamma, n_max, sp.lambda0, cycles,
               tf.kappa_x, tf.kappa_y, tf.alpha, len(sp.eigenvalues))
    manifest.add_bytes("spectrum_summary.csv", csv_bytes(SPECTRUM_SUMMARY_COLUMNS, [summary]))
    manifest.diagnostics.update({"lambda0": sp.lambda0, "instability_cycles": cycles,
                                 "tf_residual": residuals_of(tf, params).max_abs()})
    return EXIT_OK


def cmd_stability_map(cfg: RunConfig, manifest) -> int:
    """lambda0 over the (Omega, eps_dd) grid as long CSV and a PGM of lambda0^(1/4)."""
    params = system_params(cfg)
    omegas = sorted(set(expand_values(cfg.get("omega_values"), "omega_values")))
    eps = sorted(set(expand_values(cfg.get("eps_values"), "eps_values")))
    if any(w < 0 for w in omegas) or any(not 0.0 <= e < 1.0 for e in eps):
        raise ConfigError("need Omega >= 0 and eps_dd in [0, 1)")
    pts = stability_map(omegas, eps, params.gamma, int(cfg["n_max"]), threads=int(cfg["threads"]),
                        interaction_scale=params.interaction_scale)
    rows, failed = [], 0
    img = np.full((len(omegas), len(eps)), np.nan)
    for k, p in enumerate(pts):
        tf = p.tf
        if p.error:
            failed += 1
        rows.append((p.omega, p.eps_dd, p.lambda0, p.lambda0_quarter,
                     tf.kappa_x if tf else None, tf.kappa_y if tf else None,
                     tf.alpha if tf else None, p.error))
        if p.lambda0_quarter is not None:
            img[k // len(eps), k % len(eps)] = p.lambda0_quarter
    manifest.add_bytes("stability_map.csv", csv_bytes(MAP_COLUMNS, rows))
    manifest.add_bytes("stability_map.pgm", pgm_bytes(img))
    manifest.diagnostics.update({"failed_points": failed, "shape": [len(omegas), len(eps)],
                                 "pgm_rows": "Omega ascending", "pgm_columns": "eps_dd ascending",
                                 "lambda0_max": float(np.nanmax(img) ** 4) if np.isfinite(img).any()
                                 else None})
    return EXIT_PARTIAL if failed else EXIT_OK


# --------------------------------------------------------- simulator tasks

def _ground(cfg: RunConfig, params: SystemParams, grid: SimGrid, manifest):
    g = cfg["ground"]
    gs = ground_state(params, grid, tol=float(g["tol"]), dt=float(g["dt"]),
                      max_time=float(g["max_time"]),
                      workers=int(cfg["threads"]))
    manifest.warnings.extend(gs.notes)
    return gs


def _write_slices(manifest, prefix: str, density, phase):
    manifest.add_bytes(f"{prefix}_density.csv", matrix_csv_bytes(density))
    manifest.add_bytes(f"{prefix}_phase.csv", matrix_csv_bytes(phase))


def _snapshot(manifest, state, name, seed):
    data, head = save_snapshot(state, manifest.out_dir / name, seed)
    manifest.add_file(data.name)
    manifest.add_file(head.name)


def cmd_sim_ground(cfg: RunConfig, manifest) -> int:
    """Imaginary-time ground state with a summary row, z = 0 slices and a snapshot."""
    params = system_params(cfg)
    grid = _sim_grid(cfg)
    gs = _ground(cfg, params, grid, manifest)
    e, m = gs.energy, moments(gs.state)
    mu_tf = rz_tf = None
    if params.interaction_scale > 0 and params.eps_dd == 0.0:
        tf = make_tf_state(params.gamma, params.gamma, params.with_(omega=0.0))
        mu_tf, rz_tf = tf.mu, tf.r_z
    row = (e.mu, e.total, e.kinetic, e.trap, e.contact, e.dipolar, e.lz, m.x2, m.y2, m.z2,
           math.sqrt(7.0 * m.z2), mu_tf, rz_tf, gs.iterations, gs.imaginary_time, gs.converged)
    manifest.add_bytes("ground.csv", csv_bytes(GROUND_COLUMNS, [row]))
    _write_slices(manifest, "ground_z0", *z0_slices(gs.state))
    _snapshot(manifest, gs.state, "ground", cfg["seed"])
    manifest.diagnostics.update({"grid": grid.to_dict(), "grid_notes": grid.guidance(rz_tf),
                                 "iterations": gs.iterations})
    return EXIT_OK


def _tf_alpha_along(params: SystemParams, eps_values) -> dict:
    uniq = sorted(set(float(e) for e in eps_values))
    try:
        curve = eps_continuation(params.with_(eps_dd=0.0), uniq)
    except RotBecError:
        return {}
    return {e: s.alpha for e, s in curve.samples}


def cmd_sim_ramp(cfg: RunConfig, manifest) -> int:
    """Ground state at eps_dd = eps_start, then a seeded linear ramp in real time."""
    params = system_params(cfg)
    grid = _sim_grid(cfg)
    r = cfg["ramp"]
    try:
        proto = RampProtocol(rate=float(r["rate"]), eps_start=float(r["eps_start"]),
                             eps_stop=float(r["eps_stop"]), amplitude=float(r["amplitude"]),
                             seed=int(cfg["seed"]), dt=float(r["dt"]),
                             sample_every=int(r["sample_every"]),
                             checkpoints=tuple(r.get("checkpoints") or ()))
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"invalid ramp block: {exc}") from exc
    gs = _ground(cfg, params.with_(eps_dd=proto.eps_start), grid, manifest)
    res = run_ramp(gs.state, proto, workers=int(cfg["threads"]))
    manifest.warnings.extend(res.warnings)

    manifest.add_bytes("timeseries.csv", csv_bytes(TIMESERIES_COLUMNS + res.extra_columns,
                                                   res.rows))
    eps_col, a_col, t_col = res.column("eps_dd"), res.column("alpha_est"), res.column("t")
    tf_alpha = _tf_alpha_along(params, eps_col)
    comp = []
    for t, e, a in zip(t_col, eps_col, a_col):
        at = tf_alpha.get(float(e))
        comp.append((t, e, a, at, None if at is None else abs(a - at)))
    manifest.add_bytes("comparison.csv", csv_bytes(COMPARISON_COLUMNS, comp))

    resid = {}
    for c, (t, e, dens, phase) in sorted(res.snapshots.items()):
        _write_slices(manifest, f"slice_eps{_tag(c)}", dens, phase)
        resid[_tag(c)] = paraboloid_residual(dens, grid.x)
    if res.final is not None:
        _snapshot(manifest, res.final, "final", cfg["seed"])

    have = [(e, a, tf_alpha[float(e)]) for e, a in zip(eps_col, a_col) if float(e) in tf_alpha]
    summary = branch_comparison(*map(np.array, zip(*have))) if have else {}
    manifest.diagnostics.update({
        "grid": grid.to_dict(), "ground_mu": gs.energy.mu, "steps": proto.n_steps,
        "ramp": proto.to_dict(), "aborted": res.aborted, "abort_reason": res.reason,
        "branch_comparison": summary, "slice_paraboloid_residual": resid,
    })
    if res.aborted:
        raise PartialRun(res.reason)
    return EXIT_OK


class PartialRun(RotBecError):
    """The simulator stopped early; the outputs written so far are kept."""


COMMANDS = {
    "tf-branches": cmd_tf_branches,
    "tf-bifurcation": cmd_tf_bifurcation,
    "timeavg-compare": cmd_timeavg_compare,
    "stability-spectrum": cmd_stability_spectrum,
    "stability-map": cmd_stability_map,
    "sim-ground": cmd_sim_ground,
    "sim-ramp": cmd_sim_ramp,
}
