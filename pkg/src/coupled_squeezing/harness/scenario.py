"""Single-scenario pipeline: configure drives, propagate, extract the squeezing trace."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .. import hamiltonians as ham
from ..bessel import j0
from ..errors import ConfigError
from ..observables import (
    SqueezingTrace,
    find_optimal_squeezing,
    spin_moments,
    squeezing_parameter,
)
from ..propagator import Propagator, TimeGrid
from ..spin_algebra import Operator, coherent_spin_state, collective_operator, make_spin_space, reduced_density
from .config import ScenarioConfig

VALIDITY_LIMIT = 0.1

# initial S polarisation (theta, phi) for each axis
_POLE = {"x": (math.pi / 2, 0.0), "y": (math.pi / 2, math.pi / 2), "z": (0.0, 0.0)}


class RegimeWarning(UserWarning):
    """A full-dynamics run sits outside the regime where the effective model is expected to hold."""


@dataclass(frozen=True)
class Setup:
    """Everything derived from a config before propagation starts."""

    config: ScenarioConfig
    ideal: ham.DriveConfig
    drive: ham.DriveConfig
    params: ham.EffectiveParams
    ideal_params: ham.EffectiveParams
    branch: ham.TATBranch | None
    a_over_omega: float
    init_s: tuple
    predicted_t_min: float
    grid: TimeGrid


@dataclass
class ScenarioResult:
    setup: Setup
    trace: SqueezingTrace
    report: object
    states: np.ndarray
    propagator: Propagator
    warnings: list

    @property
    def dims(self):
        cfg = self.setup.config
        if cfg.is_full:
            return (cfg.n_s + 1, cfg.n_j + 1)
        return (cfg.n_s + 1, 1)


def predicted_optimum(scheme_is_tat, chi_abs, n_s):
    """Closed-form (xi2_min, t_min) for OAT/TAT at nonlinearity |chi|."""
    if scheme_is_tat:
        return 1.8 / n_s, 3.0 * math.log(4 * n_s) / (2.0 * chi_abs * n_s)
    return 0.5 * (n_s / 3.0) ** (-2.0 / 3.0), 3.0 ** (1.0 / 6.0) / (chi_abs * n_s ** (2.0 / 3.0))


def _couplings(cfg):
    return ham.interaction_couplings(
        cfg.interaction_preset, g=cfg.g, h1_axis=cfg.h1_axis, custom=(cfg.g_x, cfg.g_y, cfg.g_z)
    )


def prepare(cfg: ScenarioConfig) -> Setup:
    gx, gy, gz = _couplings(cfg)
    base = ham.DriveConfig(gx, gy, gz, 0.0, 0.0, cfg.n_s, cfg.n_j)
    if cfg.omega is not None:
        omega = cfg.omega
        omega_prime = ham.solve_omega_prime(base.replace(omega_cap=omega))
    else:
        omega, omega_prime = ham.solve_drives_for_delta(cfg.delta_over_g * cfg.g, base)
    ideal = base.replace(omega_cap=omega, omega_prime=omega_prime)
    ideal_params = ham.effective_params(ideal)

    branch = None
    a_over_omega = 0.0
    if cfg.is_tat:
        branch = ham.tat_branch_select(ideal_params.p, ideal_params.q)
        a_over_omega = ham.ac_ratio_for(branch)
        chi_abs = 3.0 * abs(branch.coefficient)
        frequency = cfg.ac_frequency
        if frequency is None:
            frequency = cfg.ac_frequency_factor * chi_abs * cfg.n_s
        ideal = ideal.replace(
            ac_amplitude=a_over_omega * frequency, ac_frequency=frequency, ac_axis=branch.drive_axis
        )
        ideal_params = ham.effective_params(ideal)
    else:
        if ideal_params.oat_axis is None or not math.isfinite(ideal_params.chi_eff):
            raise ConfigError("couplings do not reduce to a one-axis twisting form (p != q, both nonzero)")
        chi_abs = abs(ideal_params.chi_eff)
    if chi_abs == 0.0:
        raise ConfigError("effective nonlinearity vanishes for this interaction")

    drive = ideal.replace(
        omega_cap=ideal.omega_cap * (1.0 + cfg.epsilon),
        omega_prime=ideal.omega_prime * (1.0 + cfg.epsilon_prime),
    )
    params = ham.effective_params(drive)

    if cfg.init_s_theta is not None:
        init_s = (cfg.init_s_theta, cfg.init_s_phi)
    elif branch is not None:
        init_s = _POLE[branch.saddle_axis]
    else:
        # equator state perpendicular to the twisting axis
        init_s = _POLE["x"] if ideal_params.oat_axis == "y" else _POLE["y"]

    _, t_pred = predicted_optimum(cfg.is_tat, chi_abs, cfg.n_s)
    t_end = cfg.t_end if cfg.t_end is not None else cfg.t_end_factor * t_pred
    return Setup(
        config=cfg,
        ideal=ideal,
        drive=drive,
        params=params,
        ideal_params=ideal_params,
        branch=branch,
        a_over_omega=a_over_omega,
        init_s=init_s,
        predicted_t_min=t_pred,
        grid=TimeGrid(t_end, cfg.n_samples),
    )


def _s_operator(space, axis):
    return collective_operator(space, axis)


def effective_hamiltonian(setup: Setup) -> Operator:
    """Spin-S Hamiltonian of the effective schemes, including residual imperfection terms."""
    cfg, params = setup.config, setup.params
    space = make_spin_space(cfg.n_s)
    imperfect = cfg.epsilon != 0.0 or cfg.epsilon_prime != 0.0
    if cfg.scheme == "effective_oat":
        h = ham.build_effective_oat(params.chi_eff, space, setup.ideal_params.oat_axis)
        if imperfect:
            h = h + _s_operator(space, "z") * params.f
        return h
    branch = setup.branch
    if not imperfect:
        return ham.build_twisting(branch.coefficient, space, *branch.twist_axes)
    h = ham.build_rwa_hamiltonian(params.p, params.q, branch.drive_axis, branch.bessel_target, space)
    # the drive rotation averages S_z to J0(A/w) S_z unless it rotates about z itself
    linear = params.f if branch.drive_axis == "z" else params.f * j0(setup.a_over_omega)
    return h + _s_operator(space, "z") * linear


def full_hamiltonian(setup: Setup):
    space_s, space_j = make_spin_space(setup.config.n_s), make_spin_space(setup.config.n_j)
    static = ham.build_static_hamiltonian(setup.drive, (space_s, space_j))
    ac = None
    if setup.config.scheme == "full_dc_ac":
        ac = ham.build_ac_drive(setup.drive, (space_s, space_j))
    return static, ac


def initial_state(setup: Setup):
    cfg = setup.config
    psi_s = coherent_spin_state(make_spin_space(cfg.n_s), *setup.init_s)
    if not cfg.is_full:
        return psi_s
    psi_j = coherent_spin_state(make_spin_space(cfg.n_j), cfg.init_j_theta, cfg.init_j_phi)
    return np.kron(psi_s, psi_j)


def build_propagator(setup: Setup) -> Propagator:
    cfg = setup.config
    if cfg.is_full:
        static, ac = full_hamiltonian(setup)
        return Propagator(static, ac, dense_limit=cfg.dense_limit)
    return Propagator(effective_hamiltonian(setup), None, dense_limit=cfg.dense_limit)


def s_density(setup: Setup, psi):
    cfg = setup.config
    dims = (cfg.n_s + 1, cfg.n_j + 1) if cfg.is_full else (cfg.n_s + 1, 1)
    return reduced_density(psi, dims)


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Propagate one configuration and extract its squeezing trace and optimum."""
    caught = []
    setup = prepare(cfg)
    space = make_spin_space(cfg.n_s)
    if cfg.is_full:
        for label, ratio in (("validity_s", setup.params.validity_s), ("validity_j", setup.params.validity_j)):
            if ratio > VALIDITY_LIMIT:
                message = f"{label} = {ratio:.3g} exceeds {VALIDITY_LIMIT}"
                warnings.warn(message, RegimeWarning, stacklevel=2)
                caught.append(message)

    prop = build_propagator(setup)
    states, report = prop.evolve(initial_state(setup), setup.grid, tol=cfg.tol)
    times = setup.grid.times

    xi2 = np.empty(len(times))
    means = np.empty((len(times), 3))
    for i, psi in enumerate(states):
        rho = s_density(setup, psi)
        means[i], _ = spin_moments(rho, space)
        xi2[i] = squeezing_parameter(rho, space)
    norm_err = np.linalg.norm(states, axis=1) - 1.0

    def sample(t):
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), len(times) - 1)
        psi = prop.advance(states[k], times[k], t)
        return squeezing_parameter(s_density(setup, psi), space)

    with warnings.catch_warnings(record=True) as seen:
        warnings.simplefilter("always")
        best = find_optimal_squeezing(sample, times, xi2, refine=cfg.refine)
    for w in seen:
        caught.append(str(w.message))
        warnings.warn(w.message, w.category, stacklevel=2)

    trace = SqueezingTrace(
        times=times,
        xi2=xi2,
        mean_spin=means,
        norm_err=norm_err,
        xi2_min=best.xi2_min,
        t_min=best.t_min,
        boundary_minimum=best.boundary_minimum,
    )
    return ScenarioResult(setup, trace, report, states, prop, caught)


def state_at(result: ScenarioResult, t):
    """Joint (or S-only) state at time ``t``, re-propagated from the nearest earlier grid point."""
    times = result.trace.times
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(max(k, 0), len(times) - 1)
    return result.propagator.advance(result.states[k], times[k], t)
