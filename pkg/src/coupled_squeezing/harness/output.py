"""Deterministic text outputs: trace/sweep CSVs and key = value summaries."""

from __future__ import annotations

import math
import os

TRACE_HEADER = "t,xi2,sx,sy,sz,norm_err"
SWEEP_HEADER = "x,xi2_min,t_min,delta_rel"


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return ", ".join(fmt(v) for v in value)
    try:
        return f"{float(value):.17g}"
    except (TypeError, ValueError):
        return str(value)


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_lines(path, lines):
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def write_trace_csv(path, trace):
    lines = [TRACE_HEADER]
    for t, xi2, (sx, sy, sz), err in zip(trace.times, trace.xi2, trace.mean_spin, trace.norm_err):
        lines.append(",".join(fmt(float(v)) for v in (t, xi2, sx, sy, sz, err)))
    write_lines(path, lines)


def write_summary(path, pairs):
    write_lines(path, [f"{key} = {fmt(value)}" for key, value in pairs])


def scenario_summary(result):
    """Ordered key/value pairs describing one scenario run."""
    setup, trace, report = result.setup, result.trace, result.report
    cfg, params, drive = setup.config, setup.params, setup.drive
    chi = params.chi_eff
    if setup.branch is not None:
        # TAT runs quote the twisting strength of (chi/3)(S_a^2 - S_b^2)
        chi = 3.0 * setup.branch.coefficient
    return [
        ("scheme", cfg.scheme),
        ("interaction_preset", cfg.interaction_preset),
        ("n_s", cfg.n_s),
        ("n_j", cfg.n_j),
        ("g_x", drive.g_x),
        ("g_y", drive.g_y),
        ("g_z", drive.g_z),
        ("delta_over_g", params.delta / cfg.g if cfg.g else math.nan),
        ("omega", drive.omega_cap),
        ("omega_prime", drive.omega_prime),
        ("epsilon", cfg.epsilon),
        ("epsilon_prime", cfg.epsilon_prime),
        ("chi_eff", float(chi)),
        ("p", params.p),
        ("q", params.q),
        ("f", params.f),
        ("a_over_omega", setup.a_over_omega),
        ("ac_frequency", drive.ac_frequency),
        ("ac_amplitude", drive.ac_amplitude),
        ("ac_axis", drive.ac_axis if setup.branch is not None else "none"),
        ("tat_branch", f"{setup.branch.drive_axis}{setup.branch.variant}" if setup.branch else "none"),
        ("init_s_theta", float(setup.init_s[0])),
        ("init_s_phi", float(setup.init_s[1])),
        ("xi2_min", trace.xi2_min),
        ("t_min", trace.t_min),
        ("boundary_minimum", trace.boundary_minimum),
        ("predicted_t_min", setup.predicted_t_min),
        ("t_end", float(setup.grid.t_end)),
        ("n_samples", setup.grid.n_samples),
        ("validity_s", params.validity_s),
        ("validity_j", params.validity_j),
        ("rwa_ratio", params.rwa_ratio),
        ("method", report.method),
        ("step_size", report.step_size if report.step_size is not None else math.nan),
        ("steps_taken", report.steps_taken),
        ("step_disagreement", report.disagreement),
        ("max_norm_drift", report.max_norm_drift),
        ("max_energy_drift_rel", report.max_energy_drift_rel if report.max_energy_drift_rel is not None else math.nan),
        ("warnings", len(result.warnings)),
    ]


def write_scenario(prefix, result):
    """``<prefix>_trace.csv`` and ``<prefix>_summary.txt``; returns both paths."""
    trace_path, summary_path = f"{prefix}_trace.csv", f"{prefix}_summary.txt"
    write_trace_csv(trace_path, result.trace)
    write_summary(summary_path, scenario_summary(result))
    return trace_path, summary_path


def write_sweep(prefix, sweep, cfg):
    """``<prefix>_sweep.csv`` and ``<prefix>_sweep_summary.txt``; returns both paths."""
    csv_path, summary_path = f"{prefix}_sweep.csv", f"{prefix}_sweep_summary.txt"
    lines = [SWEEP_HEADER]
    for row in sweep.rows:
        lines.append(",".join(fmt(float(v)) for v in (row.x, row.xi2_min, row.t_min, row.delta_rel)))
    write_lines(csv_path, lines)
    pairs = [
        ("sweep", sweep.kind),
        ("scheme", cfg.scheme),
        ("interaction_preset", cfg.interaction_preset),
        ("n_s", cfg.n_s),
        ("n_j", cfg.n_j),
        ("delta_over_g", cfg.delta_over_g),
        ("rows", len(sweep.rows)),
    ]
    if sweep.fit is not None:
        pairs += [("xi2_slope", sweep.fit[0]), ("xi2_intercept", sweep.fit[1]), ("xi2_r2", sweep.fit[2])]
    if sweep.t_fit is not None:
        pairs += [("t_slope", sweep.t_fit[0]), ("t_intercept", sweep.t_fit[1]), ("t_r2", sweep.t_fit[2])]
    for key, value in (sweep.extras or {}).items():
        pairs.append((key, value))
    write_summary(summary_path, pairs)
    return csv_path, summary_path
