"""Driven coupled-spin Hamiltonians and their second-order effective forms.

Rates are in units of a reference coupling g (g = 1 sets the time unit
1/g).  The full model is

    H(t) = sum_mu g_mu S_mu J_mu + Omega J_z + Omega' S_z + A cos(w t) S_axis

and eliminating the S-J exchange to second order, with J frozen in its
top state, leaves ``f S_z + p S_x**2 + q S_y**2`` acting on S alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bessel
from .bessel import solve_bessel_ratio
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NoSolutionError,
    SingularConditionError,
)
from .spin_algebra import Operator, SpinSpace, collective_operator, embed_pair, make_spin_space

PRESETS = ("H1", "H2", "H3", "custom")


@dataclass(frozen=True)
class DriveConfig:
    g_x: float
    g_y: float
    g_z: float
    omega_cap: float
    omega_prime: float
    n_s: int
    n_j: int
    ac_amplitude: float = 0.0
    ac_frequency: float = 0.0
    ac_axis: str = "y"

    def __post_init__(self):
        if self.n_s < 1 or self.n_j < 1:
            raise InvalidArgumentError("particle numbers must be positive")
        if self.ac_amplitude < 0:
            raise InvalidArgumentError("ac_amplitude must be >= 0")
        if self.ac_amplitude > 0 and not self.ac_frequency > 0:
            raise InvalidArgumentError("an AC drive needs ac_frequency > 0")
        if self.ac_axis not in ("y", "z"):
            raise InvalidArgumentError(f"ac_axis must be 'y' or 'z', got {self.ac_axis!r}")

    def replace(self, **changes):
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return DriveConfig(**values)


@dataclass(frozen=True)
class EffectiveParams:
    theta_xy: float
    theta_yx: float
    f: float
    p: float
    q: float
    chi_eff: float
    oat_axis: str | None
    delta: float
    validity_s: float
    validity_j: float
    rwa_ratio: float


@dataclass(frozen=True)
class ACDrive:
    """Time-dependent term ``amplitude * cos(frequency * t) * operator``.

    ``factor`` optionally records that ``operator = factor (x) 1`` on a
    product space with dimensions ``dims``, which lets the propagator
    exponentiate it cheaply.
    """

    amplitude: float
    frequency: float
    operator: Operator
    axis: str
    factor: Operator | None = None
    dims: tuple | None = None

    def coefficient(self, t):
        return self.amplitude * math.cos(self.frequency * t)

    def at(self, t):
        return self.operator * self.coefficient(t)

    def negated(self):
        return ACDrive(-self.amplitude, self.frequency, self.operator, self.axis, self.factor, self.dims)


@dataclass(frozen=True)
class TATBranch:
    """How to turn ``p S_x^2 + q S_y^2`` into a two-axis twisting form.

    The effective Hamiltonian is ``coefficient * (S_a^2 - S_b^2)`` with
    ``(a, b) = twist_axes``; ``saddle_axis`` is the remaining axis, the
    unstable fixed point a coherent state should start from.
    """

    drive_axis: str
    variant: int
    bessel_target: float
    coefficient: float
    twist_axes: tuple
    saddle_axis: str


def interaction_couplings(preset, g=1.0, h1_axis="x", custom=None):
    """(g_x, g_y, g_z) for a named interaction.

    H1 is a single-axis coupling along ``h1_axis``; H2 is isotropic
    exchange; H3 is exchange with a -2 weight on z.
    """
    if preset == "H1":
        if h1_axis not in ("x", "y", "z"):
            raise InvalidArgumentError(f"h1_axis must be x, y or z, got {h1_axis!r}")
        return tuple(g if axis == h1_axis else 0.0 for axis in "xyz")
    if preset == "H2":
        return (g, g, g)
    if preset == "H3":
        return (g, g, -2.0 * g)
    if preset == "custom":
        if custom is None or len(custom) != 3:
            raise InvalidArgumentError("custom preset needs three couplings (g_x, g_y, g_z)")
        return tuple(float(c) for c in custom)
    raise InvalidArgumentError(f"unknown interaction preset {preset!r}; expected one of {PRESETS}")


def _spaces_for(config, spaces):
    if spaces is None:
        return make_spin_space(config.n_s), make_spin_space(config.n_j)
    space_s, space_j = spaces
    if space_s.n_particles != config.n_s or space_j.n_particles != config.n_j:
        raise DimensionMismatchError(
            f"spaces ({space_s.n_particles}, {space_j.n_particles}) do not match "
            f"config ({config.n_s}, {config.n_j})"
        )
    return space_s, space_j


def build_interaction(config: DriveConfig, spaces=None) -> Operator:
    space_s, space_j = _spaces_for(config, spaces)
    dims = (space_s.dim, space_j.dim)
    total = None
    for axis, g in zip("xyz", (config.g_x, config.g_y, config.g_z)):
        term = embed_pair(collective_operator(space_s, axis), collective_operator(space_j, axis), dims) * g
        total = term if total is None else total + term
    return Operator(total.matrix, True)


def build_dc_drive(config: DriveConfig, spaces=None) -> Operator:
    space_s, space_j = _spaces_for(config, spaces)
    dims = (space_s.dim, space_j.dim)
    on_j = embed_pair(None, collective_operator(space_j, "z"), dims) * config.omega_cap
    on_s = embed_pair(collective_operator(space_s, "z"), None, dims) * config.omega_prime
    return Operator((on_j + on_s).matrix, True)


def build_static_hamiltonian(config: DriveConfig, spaces=None) -> Operator:
    spaces = _spaces_for(config, spaces)
    total = build_interaction(config, spaces) + build_dc_drive(config, spaces)
    return Operator(total.matrix, True)


def build_ac_drive(config: DriveConfig, spaces=None, axis=None) -> ACDrive:
    space_s, space_j = _spaces_for(config, spaces)
    axis = config.ac_axis if axis is None else axis
    if axis not in ("x", "y", "z"):
        raise InvalidArgumentError(f"invalid AC drive axis {axis!r}")
    factor = collective_operator(space_s, axis)
    dims = (space_s.dim, space_j.dim)
    op = embed_pair(factor, None, dims)
    return ACDrive(float(config.ac_amplitude), float(config.ac_frequency), op, axis, factor, dims)


def _denominator(config):
    om, omp = config.omega_cap, config.omega_prime
    denom = om * om - omp * omp
    if denom == 0.0 or abs(denom) <= 1e-14 * max(om * om, omp * omp):
        raise SingularConditionError(f"Omega^2 == Omega'^2 (Omega={om!r}, Omega'={omp!r})")
    return denom


def fnt_coefficients(config: DriveConfig):
    """Generator coefficients (theta_xy, theta_yx) that cancel the first-order exchange."""
    denom = _denominator(config)
    om, omp = config.omega_cap, config.omega_prime
    theta_xy = (config.g_x * om + config.g_y * omp) / denom
    theta_yx = -(config.g_y * om + config.g_x * omp) / denom
    return theta_xy, theta_yx


def linear_coefficient(config: DriveConfig):
    """Coefficient f of S_z in the effective Hamiltonian."""
    denom = _denominator(config)
    gx, gy, gz = config.g_x, config.g_y, config.g_z
    om, omp, nj = config.omega_cap, config.omega_prime, config.n_j
    return omp + 0.5 * gz * nj - nj * ((gx * gx + gy * gy) * omp + 2.0 * gx * gy * om) / (8.0 * denom)


def _chi_and_axis(config, p, q):
    gx, gy = config.g_x, config.g_y
    om, omp, nj = config.omega_cap, config.omega_prime, config.n_j
    if gx == gy:
        # p == q: p (S_x^2 + S_y^2) = -p S_z^2 + const
        if gx == 0.0:
            return 0.0, "z"
        return -gx * gx * nj / (4.0 * (om - omp)), "z"
    if gy == 0.0:
        return p, "x"
    if gx == 0.0:
        return q, "y"
    if p == q:
        return -p, "z"
    return math.nan, None


def effective_params(config: DriveConfig) -> EffectiveParams:
    denom = _denominator(config)
    theta_xy, theta_yx = fnt_coefficients(config)
    gx, gy = config.g_x, config.g_y
    om, omp, nj, ns = config.omega_cap, config.omega_prime, config.n_j, config.n_s
    f = linear_coefficient(config)
    p = nj * (gx * gx * om + gx * gy * omp) / (4.0 * denom)
    q = nj * (gy * gy * om + gx * gy * omp) / (4.0 * denom)
    chi, axis = _chi_and_axis(config, p, q)
    gap = abs(om - omp)
    g_ref = max(abs(gx), abs(gy), abs(config.g_z))
    if config.ac_frequency > 0 and (p + q) != 0:
        rwa_ratio = config.ac_frequency / (ns * (p + q))
    else:
        rwa_ratio = math.nan
    return EffectiveParams(
        theta_xy=theta_xy,
        theta_yx=theta_yx,
        f=f,
        p=p,
        q=q,
        chi_eff=chi,
        oat_axis=axis,
        delta=2.0 * (om - omp) / nj,
        validity_s=g_ref * ns / gap,
        validity_j=g_ref * nj / gap,
        rwa_ratio=rwa_ratio,
    )


def solve_omega_prime(config: DriveConfig) -> float:
    """Omega' that zeroes the linear coefficient f, with Omega held fixed.

    Plain bisection on [-|Omega|/2, |Omega|/2]; the leading-order answer is
    about -g_z N_j / 2 and the bisection refines it.
    """
    half = abs(config.omega_cap) / 2.0
    lo, hi = -half, half
    if half == 0.0:
        raise NoSolutionError("Omega = 0 leaves an empty bracket for Omega'", bracket=(lo, hi))

    def f_at(omp):
        return linear_coefficient(config.replace(omega_prime=omp))

    flo, fhi = f_at(lo), f_at(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSolutionError(
            f"f(Omega') has no sign change on [{lo!r}, {hi!r}] (f={flo!r}, {fhi!r})",
            bracket=(lo, hi),
        )
    tol = 1e-12 * abs(config.omega_cap)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = f_at(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    best = min((lo, hi), key=lambda x: abs(f_at(x)))
    if abs(f_at(best)) > tol:
        raise NoSolutionError(f"bisection ended with |f|={abs(f_at(best))!r} > {tol!r}", bracket=(lo, hi))
    return best


def solve_drives_for_delta(delta, config: DriveConfig, max_iter=100):
    """(Omega, Omega') with f = 0 and 2 (Omega - Omega') / N_j == delta.

    Omega' depends only weakly on Omega, so the fixed point of
    Omega = delta N_j / 2 + Omega'(Omega) is reached in a few iterations.
    """
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta!r}")
    gap = delta * config.n_j / 2.0
    omega_prime = -0.5 * config.g_z * config.n_j
    for _ in range(max_iter):
        new_prime = solve_omega_prime(config.replace(omega_cap=gap + omega_prime, omega_prime=0.0))
        done = abs(new_prime - omega_prime) <= 1e-14 * gap
        omega_prime = new_prime
        if done:
            break
    else:
        raise NoSolutionError(f"drive fixed point for delta={delta!r} did not settle")
    omega = gap + omega_prime
    # f = 0 exactly at the returned Omega; delta is matched to ~1e-14 relative
    return omega, solve_omega_prime(config.replace(omega_cap=omega, omega_prime=0.0))


def _squares(space):
    sx = collective_operator(space, "x").dense()
    sy = collective_operator(space, "y").dense()
    sz = collective_operator(space, "z").dense()
    return {"x": sx @ sx, "y": sy @ sy, "z": sz @ sz}


def _hermitian(mat):
    return Operator((mat + mat.conj().T) / 2, True)


def build_effective_oat(chi_eff, space: SpinSpace, axis="z") -> Operator:
    if axis not in ("x", "y", "z"):
        raise InvalidArgumentError(f"invalid twisting axis {axis!r}")
    return _hermitian(chi_eff * _squares(space)[axis])


def build_twisting(coefficient, space: SpinSpace, first, second) -> Operator:
    """``coefficient * (S_first^2 - S_second^2)``."""
    sq = _squares(space)
    return _hermitian(coefficient * (sq[first] - sq[second]))


def build_effective_tat(chi_eff, space: SpinSpace) -> Operator:
    return build_twisting(chi_eff / 3.0, space, "x", "y")


def build_rwa_hamiltonian(p, q, drive_axis, j0_value, space: SpinSpace) -> Operator:
    """Time-averaged ``p S_x^2 + q S_y^2`` under a strong AC drive along ``drive_axis``.

    Keeps only the zeroth harmonic of the drive-induced rotation; the
    result differs from the matching ``TATBranch`` form by a multiple of
    S^2 when ``j0_value`` equals the branch target.
    """
    sq = _squares(space)
    if drive_axis == "z":
        big, small, first, second = p, q, "x", "y"
    elif drive_axis == "y":
        # p S_x^2 + q S_y^2 == -q S_z^2 + (p - q) S_x^2 + q S^2
        big, small, first, second = -q, p - q, "z", "x"
    else:
        raise InvalidArgumentError(f"drive axis must be 'y' or 'z', got {drive_axis!r}")
    mean, half_diff = (big + small) / 2.0, (small - big) / 2.0
    mat = (mean - half_diff * j0_value) * sq[first] + (mean + half_diff * j0_value) * sq[second]
    return _hermitian(mat)


def tat_branch_select(p, q) -> TATBranch:
    """Pick the AC drive axis and J0 target that make ``p S_x^2 + q S_y^2`` two-axis twisting.

    Each branch has two sign variants; the first whose J0 target lies on
    the first arch of J0 is returned.
    """
    if p == 0 and q == 0:
        raise InvalidArgumentError("p and q are both zero; nothing to twist")
    low = bessel.j0_arch_minimum()
    if (p - 2 * q) * (2 * p - q) >= 0 and p != q:
        ratio = (p + q) / (3.0 * (q - p))
        coefficient = (p + q) / 3.0
        candidates = [
            TATBranch("z", 1, ratio, coefficient, ("y", "z"), "x"),
            TATBranch("z", 2, -ratio, coefficient, ("x", "z"), "y"),
        ]
    else:
        ratio = (p - 2 * q) / (3.0 * p)
        coefficient = (p - 2 * q) / 3.0
        candidates = [
            TATBranch("y", 1, ratio, coefficient, ("x", "y"), "z"),
            TATBranch("y", 2, -ratio, coefficient, ("z", "y"), "x"),
        ]
    for branch in candidates:
        if low <= branch.bessel_target <= 1.0:
            return branch
    raise NoSolutionError(
        f"no J0 target of the {candidates[0].drive_axis}-branch lies in [{low!r}, 1]",
        bracket=(0.0, bessel.first_arch_end()),
    )


def ac_ratio_for(branch: TATBranch):
    """Drive ratio A / w realising ``branch`` (J0(2A/w) == target)."""
    return solve_bessel_ratio(branch.bessel_target) / 2.0
