"""Spin-S observables: mean spin, Kitagawa-Ueda squeezing, Husimi Q maps, optimum search."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UndefinedDirectionError
from .spin_algebra import DensityMatrix, SpinSpace, coherent_spin_state, spin_vector

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BoundaryMinimumWarning(UserWarning):
    """The smallest sampled value sits at the edge of the search grid."""


@dataclass(frozen=True)
class SqueezingTrace:
    times: np.ndarray
    xi2: np.ndarray
    mean_spin: np.ndarray
    norm_err: np.ndarray
    xi2_min: float
    t_min: float
    boundary_minimum: bool = False


@dataclass(frozen=True)
class OptimalSqueezing:
    xi2_min: float
    t_min: float
    boundary_minimum: bool = False


@dataclass(frozen=True)
class HusimiMap:
    theta_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def normalization(self, n_particles):
        """(2j+1)/(4 pi) times the quadrature of Q over the sphere; 1 for any state."""
        return float((n_particles + 1) / (4.0 * math.pi) * np.sum(self.values * self.weights))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("theta,phi,q_value\n")
            for i, theta in enumerate(self.theta_grid):
                for k, phi in enumerate(self.phi_grid):
                    fh.write(f"{theta:.17g},{phi:.17g},{self.values[i, k]:.17g}\n")


def _entries(rho):
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)


def mean_spin(rho, space: SpinSpace):
    r = _entries(rho)
    return np.array([np.real(np.sum(op.T * r)) for op in spin_vector(space)])


def spin_moments(rho, space: SpinSpace):
    """Mean spin vector and the symmetrised covariance matrix of (S_x, S_y, S_z)."""
    r = _entries(rho)
    ops = spin_vector(space)
    mean = np.array([np.real(np.sum(op.T * r)) for op in ops])
    # tr(rho A B) for all pairs; symmetrise afterwards
    r_ops = [r @ op for op in ops]
    second = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            second[a, b] = np.real(np.sum(r_ops[a].T * ops[b]))
    second = (second + second.T) / 2
    return mean, second - np.outer(mean, mean)


def transverse_basis(direction):
    """Orthonormal pair spanning the plane perpendicular to ``direction``."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    ref = np.eye(3)[int(np.argmin(np.abs(u)))]
    n1 = np.cross(u, ref)
    n1 /= np.linalg.norm(n1)
    n2 = np.cross(u, n1)
    return n1, n2


def squeezing_parameter(rho, space: SpinSpace):
    """xi^2 = 4 (Delta S_perp)^2_min / N, minimised over the plane normal to <S>."""
    mean, cov = spin_moments(rho, space)
    length = np.linalg.norm(mean)
    if length <= 1e-9 * space.n_particles / 2:
        raise UndefinedDirectionError(f"mean spin length {length:.3e} is too small to define a direction")
    n1, n2 = transverse_basis(mean)
    c11, c22, c12 = n1 @ cov @ n1, n2 @ cov @ n2, n1 @ cov @ n2
    var_min = 0.5 * (c11 + c22 - math.hypot(c11 - c22, 2.0 * c12))
    return 4.0 * var_min / space.n_particles


def husimi_q(rho, space: SpinSpace, n_theta=121, n_phi=241):
    """Q(theta, phi) = <theta, phi| rho |theta, phi> on a regular sphere grid.

    phi spans [0, 2 pi] with both ends included, so the last column
    repeats the first.  ``weights`` carries sin(theta) times Simpson
    weights in theta (trapezoid when the interval count is odd) and
    trapezoid weights in phi.
    """
    if n_theta < 2 or n_phi < 2:
        raise InvalidArgumentError("Husimi grid needs at least 2 points per axis")
    r = _entries(rho)
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi)
    values = np.empty((n_theta, n_phi))
    # |theta, phi> = |theta, 0> with the k-th amplitude times exp(i k phi)
    phase = np.exp(1j * np.outer(phis, np.arange(space.dim)))
    for i, theta in enumerate(thetas):
        kets = phase * coherent_spin_state(space, theta, 0.0)
        values[i] = np.real(np.einsum("pi,ij,pj->p", kets.conj(), r, kets))
    values = np.clip(values, 0.0, None)
    d_theta, d_phi = thetas[1] - thetas[0], phis[1] - phis[0]
    w_theta = _theta_weights(n_theta, d_theta)
    w_phi = np.full(n_phi, d_phi)
    w_phi[[0, -1]] *= 0.5
    weights = np.outer(np.sin(thetas) * w_theta, w_phi)
    return HusimiMap(thetas, phis, values, weights)


def _theta_weights(n, step):
    if n >= 3 and (n - 1) % 2 == 0:
        w = np.ones(n)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * step / 3.0
    w = np.full(n, step)
    w[[0, -1]] *= 0.5
    return w


def golden_section_minimize(func, lo, hi, rtol=1e-3, max_iter=200):
    """Minimise a unimodal ``func`` on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    scale = max(abs(lo), abs(hi), 1e-300)
    for _ in range(max_iter):
        if b - a <= rtol * scale:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = func(d)
    return (c, fc) if fc < fd else (d, fd)


def find_optimal_squeezing(sample, times, values=None, refine=True, rtol=1e-3):
    """Locate the minimum of xi^2(t).

    ``sample(t)`` returns xi^2 at time ``t``; ``values`` may carry the
    already-computed coarse samples on ``times``.  The coarse minimum is
    refined by golden-section search over its two neighbouring intervals.
    """
    times = np.asarray(times, dtype=float)
    if values is None:
        values = np.array([sample(t) for t in times])
    values = np.asarray(values, dtype=float)
    i = int(np.argmin(values))
    best_t, best = float(times[i]), float(values[i])
    boundary = i == 0 or i == len(times) - 1
    if boundary:
        warnings.warn(
            f"xi^2 minimum at grid edge t={best_t:.6g}; extend the time grid",
            BoundaryMinimumWarning,
            stacklevel=2,
        )
        return OptimalSqueezing(best, best_t, True)
    if refine:
        t, val = golden_section_minimize(sample, float(times[i - 1]), float(times[i + 1]), rtol=rtol)
        if val < best:
            best_t, best = float(t), float(val)
    return OptimalSqueezing(best, best_t, False)
