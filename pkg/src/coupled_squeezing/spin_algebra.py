"""Collective spin operators in the symmetric Dicke sector.

Every operator here lives in the maximal-j sector of ``n`` spin-1/2
particles (dimension ``n + 1``), written in the basis ``|j, m>`` with ``m``
descending from ``+j`` at index 0 to ``-j`` at the last index.  Joint
operators on two collective spins are ordered S first, J second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, InvalidArgumentError

# factor dimension above which single-space operators are stored sparse
DENSE_FACTOR_LIMIT = 64

AXES = ("x", "y", "z", "plus", "minus")


@dataclass(frozen=True)
class SpinSpace:
    n_particles: int
    j: Fraction = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "j", Fraction(self.n_particles, 2))
        object.__setattr__(self, "dim", self.n_particles + 1)

    @property
    def m_values(self):
        """Magnetic quantum numbers in basis order (descending)."""
        return float(self.j) - np.arange(self.dim)


def make_spin_space(n_particles) -> SpinSpace:
    if isinstance(n_particles, bool) or int(n_particles) != n_particles:
        raise InvalidArgumentError(f"n_particles must be an integer, got {n_particles!r}")
    if n_particles < 1:
        raise InvalidArgumentError(f"n_particles must be >= 1, got {n_particles}")
    return SpinSpace(int(n_particles))


class Operator:
    """A square complex matrix (dense ndarray or scipy sparse) with a Hermiticity flag.

    Instances are treated as immutable; arithmetic returns new operators.
    """

    __slots__ = ("matrix", "hermitian")

    def __init__(self, matrix, hermitian=False):
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {matrix.shape}")
        self.matrix = matrix
        self.hermitian = bool(hermitian)

    @property
    def space_dim(self):
        return self.matrix.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.matrix)

    def dense(self):
        if self.is_sparse:
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def sparse(self):
        if self.is_sparse:
            return self.matrix.tocsr()
        return sp.csr_matrix(self.matrix)

    def dag(self):
        return Operator(self.matrix.conj().T, self.hermitian)

    def hermiticity_error(self):
        diff = self.matrix - self.matrix.conj().T
        if sp.issparse(diff):
            return float(abs(diff).max()) if diff.nnz else 0.0
        return float(np.max(np.abs(diff)))

    def max_abs(self):
        if self.is_sparse:
            return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0
        return float(np.max(np.abs(self.matrix)))

    def row_sum_bound(self):
        """Maximum absolute row sum, an upper bound on the spectral norm."""
        sums = abs(self.matrix).sum(axis=1)
        return float(np.max(sums)) if self.space_dim else 0.0

    def _coerce(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.space_dim != self.space_dim:
            raise DimensionMismatchError(
                f"operator dimensions differ: {self.space_dim} vs {other.space_dim}"
            )
        a, b = self.matrix, other.matrix
        # mixing dense and sparse: keep the sparse layout
        if sp.issparse(a) != sp.issparse(b):
            a, b = sp.csr_matrix(a), sp.csr_matrix(b)
        return a, b

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        return Operator(pair[0] + pair[1], self.hermitian and other.hermitian)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        return Operator(pair[0] - pair[1], self.hermitian and other.hermitian)

    def __neg__(self):
        return Operator(-self.matrix, self.hermitian)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            return NotImplemented
        keeps = self.hermitian and np.isreal(scalar)
        return Operator(self.matrix * scalar, keeps)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            a, b = self._coerce(other)
            return Operator(a @ b, False)
        return self.matrix @ other

    def expectation(self, vector):
        return complex(np.vdot(vector, self.matrix @ vector))

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"Operator(dim={self.space_dim}, {kind}, hermitian={self.hermitian})"


@dataclass(frozen=True)
class QuantumState:
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size != dims[0] * dims[1]:
            raise DimensionMismatchError(
                f"amplitude length {amps.size} does not match dims {dims}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise InvalidArgumentError(f"state is not normalised (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, psi_s, psi_j):
        psi_s, psi_j = np.asarray(psi_s), np.asarray(psi_j)
        return cls((psi_s.size, psi_j.size), np.kron(psi_s, psi_j))


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"density matrix shape {rho.shape} != ({self.dim}, {self.dim})")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise InvalidArgumentError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise InvalidArgumentError(f"density matrix trace {np.trace(rho).real!r} != 1")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise InvalidArgumentError("density matrix has a negative eigenvalue")
        rho = np.array(rho)
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    def purity(self):
        return float(np.real(np.vdot(self.entries, self.entries)))


@lru_cache(maxsize=None)
def _ladder_dense(n_particles):
    space = SpinSpace(n_particles)
    m = space.m_values
    # <m+1|J+|m> sits just above the diagonal in descending-m order
    elements = np.sqrt(float(space.j) * (float(space.j) + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(elements.astype(complex), 1)
    jp.setflags(write=False)
    return jp


def _spin_matrices(space, axis):
    jp = _ladder_dense(space.n_particles)
    jm = jp.conj().T
    if axis == "plus":
        return jp
    if axis == "minus":
        return jm
    if axis == "x":
        return (jp + jm) / 2
    if axis == "y":
        return (jp - jm) / 2j
    if axis == "z":
        return np.diag(space.m_values.astype(complex))
    raise InvalidArgumentError(f"unknown axis {axis!r}; expected one of {AXES}")


def collective_operator(space: SpinSpace, axis: str) -> Operator:
    """Collective spin component ``axis`` on ``space`` (x, y, z, plus or minus)."""
    mat = _spin_matrices(space, axis)
    hermitian = axis in ("x", "y", "z")
    if space.dim > DENSE_FACTOR_LIMIT:
        mat = sp.csr_matrix(mat)
    else:
        mat = np.array(mat)
    return Operator(mat, hermitian)


def spin_vector(space):
    """Dense (S_x, S_y, S_z) tuple, cached per space."""
    return _spin_vector_cached(space.n_particles)


@lru_cache(maxsize=None)
def _spin_vector_cached(n_particles):
    space = SpinSpace(n_particles)
    out = []
    for axis in ("x", "y", "z"):
        mat = np.array(_spin_matrices(space, axis))
        mat.setflags(write=False)
        out.append(mat)
    return tuple(out)


def embed_pair(op_s, op_j, dims) -> Operator:
    """Tensor product ``op_s (x) op_j`` on the joint space; ``None`` stands for identity."""
    dim_s, dim_j = (int(d) for d in dims)
    for op, d, label in ((op_s, dim_s, "S"), (op_j, dim_j, "J")):
        if op is not None and op.space_dim != d:
            raise DimensionMismatchError(f"{label} factor has dimension {op.space_dim}, expected {d}")
    a = sp.identity(dim_s, dtype=complex, format="csr") if op_s is None else op_s.sparse()
    b = sp.identity(dim_j, dtype=complex, format="csr") if op_j is None else op_j.sparse()
    hermitian = (op_s is None or op_s.hermitian) and (op_j is None or op_j.hermitian)
    return Operator(sp.kron(a, b, format="csr"), hermitian)


def coherent_spin_state(space: SpinSpace, theta: float, phi: float) -> np.ndarray:
    """Maximal-weight state rotated to polar angle ``theta`` and azimuth ``phi``.

    The mean spin points along ``(sin t cos p, sin t sin p, cos t) * n/2``.
    """
    n = space.n_particles
    k = np.arange(space.dim)  # k = j - m
    half = theta / 2.0
    c, s = np.cos(half), np.sin(half)
    binom = np.sqrt(np.array([comb(n, int(i)) for i in k], dtype=float))
    # 0**0 == 1 in numpy, which gives the right pole states
    amps = binom * c ** (n - k) * s**k * np.exp(1j * k * phi)
    return amps.astype(complex)


def reduced_density(amplitudes, dims):
    """Reduced S-state of a joint vector, normalised by the vector's squared norm."""
    dim_s, dim_j = dims
    psi = np.asarray(amplitudes).reshape(dim_s, dim_j)
    rho = psi @ psi.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def partial_trace_S(state: QuantumState) -> DensityMatrix:
    """Trace out J, leaving the reduced state of the S factor."""
    return DensityMatrix(state.dims[0], reduced_density(state.amplitudes, state.dims))
