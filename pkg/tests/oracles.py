"""Brute-force reference computations used only by the tests."""

import math

import numpy as np
from scipy.linalg import expm


def spin_matrices(n):
    """(S_x, S_y, S_z) built independently from the m-basis formulas."""
    j = n / 2
    m = j - np.arange(n + 1)
    up = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        up[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    sx = (up + up.T) / 2
    sy = (up - up.T) / 2j
    return sx.astype(complex), sy, np.diag(m).astype(complex)


def scan_transverse_variance(rho, n, n_angles=3600):
    """min over directions perpendicular to <S> of Var(n.S), by an angle scan.

    A first scan over [0, pi) with ``n_angles`` points is followed by a second
    scan of ``n_angles`` points across the best cell.
    """
    ops = spin_matrices(n)
    mean = np.array([np.real(np.trace(rho @ op)) for op in ops])
    u = mean / np.linalg.norm(mean)
    # Gram-Schmidt against the coordinate axis least aligned with u
    e = np.eye(3)[np.argmin(np.abs(u))]
    a = e - (e @ u) * u
    a /= np.linalg.norm(a)
    b = np.cross(u, a)

    op_a = sum(c * o for c, o in zip(a, ops))
    op_b = sum(c * o for c, o in zip(b, ops))

    def variance(alphas):
        # Var(n.S) evaluated directly for every direction n(alpha) in the plane
        alphas = np.asarray(alphas)[:, None, None]
        op = np.cos(alphas) * op_a + np.sin(alphas) * op_b
        first = np.real(np.einsum("ij,aji->a", rho, op))
        second = np.real(np.einsum("ij,ajk,aki->a", rho, op, op))
        return second - first**2

    step = math.pi / n_angles
    coarse = variance(np.arange(n_angles) * step)
    best = int(np.argmin(coarse))
    fine = variance(np.linspace((best - 1) * step, (best + 1) * step, n_angles))
    return float(min(coarse.min(), fine.min()))


def scan_xi2(rho, n, n_angles=3600):
    return 4.0 * scan_transverse_variance(rho, n, n_angles) / n


def expm_states(h, psi0, times):
    return [expm(-1j * t * h) @ psi0 for t in times]
