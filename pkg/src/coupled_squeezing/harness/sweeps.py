"""Parameter sweeps over scenarios: N scaling, drive imperfections and Delta dependence."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, SqueezingError
from .config import ScenarioConfig
from .scenario import prepare, predicted_optimum, run_scenario

PLATEAU_BAND = 0.1


@dataclass(frozen=True)
class SweepRow:
    x: float
    xi2_min: float
    t_min: float
    delta_rel: float


@dataclass(frozen=True)
class SweepResult:
    kind: str
    rows: tuple
    fit: tuple | None = None  # (slope, intercept, r2) of log10 xi2_min vs log10 x
    t_fit: tuple | None = None  # same for t_min
    extras: dict | None = None

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


class SweepPointError(SqueezingError):
    """A sweep member failed; carries the sweep coordinate."""

    def __init__(self, x, cause):
        super().__init__(f"sweep point x={x!r} failed: {cause}")
        self.x = x
        self.cause = cause


def loglog_fit(x, y):
    """Unweighted least squares of log10 y against log10 x; returns (slope, intercept, r2)."""
    lx, ly = np.log10(np.asarray(x, dtype=float)), np.log10(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise InvalidArgumentError("a fit needs at least two points")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    spread = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / spread if spread > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def _optimum(cfg: ScenarioConfig):
    result = run_scenario(cfg)
    return result.trace.xi2_min, result.trace.t_min, result.report.max_norm_drift


def _run_point(args):
    x, cfg = args
    try:
        return _optimum(cfg)
    except SqueezingError as exc:
        raise SweepPointError(x, exc) from exc


def _max_drift(results):
    return max(r[2] for r in results)


def _map(points, workers):
    """Run ``(x, config)`` points, in order, serially or on a process pool."""
    if workers is None or workers <= 1 or len(points) <= 1:
        return [_run_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, points))


def scaling_sweep(n_list, base: ScenarioConfig, workers=1):
    """Optimal squeezing versus N_s (with N_j = N_s) plus log-log fits.

    ``delta_rel`` compares each xi2_min with the closed-form OAT/TAT estimate.
    """
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 3:
        raise InvalidArgumentError("scaling sweep needs at least three N values")
    points = [(n, base.replace(n_s=n, n_j=n)) for n in n_list]
    results = _map(points, workers)
    rows = []
    for (n, cfg), (xi2, t, _) in zip(points, results):
        setup = prepare(cfg)
        chi_abs = 3.0 * abs(setup.branch.coefficient) if setup.branch else abs(setup.ideal_params.chi_eff)
        xi2_pred, _ = predicted_optimum(cfg.is_tat, chi_abs, n)
        rows.append(SweepRow(float(n), xi2, t, (xi2 - xi2_pred) / xi2_pred))
    fit = loglog_fit(n_list, [r.xi2_min for r in rows])
    t_fit = loglog_fit(n_list, [r.t_min for r in rows])
    return SweepResult("scaling", tuple(rows), fit, t_fit, extras={"max_norm_drift": _max_drift(results)})


def imperfection_sweep(base: ScenarioConfig, vary="epsilon", values=(), workers=1):
    """Relative change of xi2_min when Omega or Omega' is off its ideal value.

    The unperturbed baseline is always part of the result and has delta_rel = 0.
    """
    if vary not in ("epsilon", "epsilon_prime"):
        raise InvalidArgumentError(f"vary must be epsilon or epsilon_prime, got {vary!r}")
    baseline = base.replace(epsilon=0.0, epsilon_prime=0.0)
    xs = sorted(set(float(v) for v in values) | {0.0})
    points = [(x, baseline.replace(**{vary: x})) for x in xs]
    results = _map(points, workers)
    ref_xi2 = results[xs.index(0.0)][0]
    rows = []
    for x, (xi2, t, _) in zip(xs, results):
        delta = 0.0 if x == 0.0 else (xi2 - ref_xi2) / ref_xi2
        rows.append(SweepRow(x, xi2, t, delta))
    extras = {"vary": vary, "baseline_xi2_min": ref_xi2, "max_norm_drift": _max_drift(results)}
    return SweepResult("imperfection", tuple(rows), extras=extras)


def _effective_counterpart(cfg: ScenarioConfig):
    return cfg.replace(scheme="effective_tat" if cfg.is_tat else "effective_oat")


def delta_sweep(base: ScenarioConfig, delta_list, workers=1):
    """Full-dynamics optimum versus Delta/g, each compared with its effective model.

    ``delta_rel`` is (full - effective) / effective; the plateau is the first
    Delta/g whose deviation is within 10%.
    """
    deltas = [float(d) for d in delta_list]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise InvalidArgumentError("delta_list must be strictly increasing")
    full_cfgs = [base.replace(delta_over_g=d, omega=None) for d in deltas]
    points = [(d, c) for d, c in zip(deltas, full_cfgs)]
    points += [(d, _effective_counterpart(c)) for d, c in zip(deltas, full_cfgs)]
    results = _map(points, workers)
    full, ref = results[: len(deltas)], results[len(deltas):]
    rows = []
    plateau = math.nan
    for d, (xi2, t, _), (ref_xi2, *_) in zip(deltas, full, ref):
        rel = (xi2 - ref_xi2) / ref_xi2
        rows.append(SweepRow(d, xi2, t, rel))
        if math.isnan(plateau) and abs(rel) <= PLATEAU_BAND:
            plateau = d
    extras = {
        "plateau_delta_over_g": plateau,
        "reference_xi2_min": [r[0] for r in ref],
        "max_norm_drift": _max_drift(results),
    }
    return SweepResult("delta", tuple(rows), extras=extras)


def run_sweep(kind, cfg: ScenarioConfig, workers=1):
    """Dispatch a sweep using the list fields stored in ``cfg``."""
    if kind == "scaling":
        return scaling_sweep(cfg.n_list, cfg, workers=workers)
    if kind == "imperfection":
        return imperfection_sweep(cfg, cfg.vary, cfg.values, workers=workers)
    if kind == "delta":
        return delta_sweep(cfg, cfg.delta_list, workers=workers)
    raise InvalidArgumentError(f"unknown sweep kind {kind!r}")
