import math

import numpy as np
import pytest

from coupled_squeezing.errors import DimensionMismatchError, InvalidArgumentError
from coupled_squeezing.spin_algebra import (
    DensityMatrix,
    Operator,
    QuantumState,
    coherent_spin_state,
    collective_operator,
    embed_pair,
    make_spin_space,
    partial_trace_S,
    reduced_density,
)


def dense(space, axis):
    return collective_operator(space, axis).dense()


@pytest.mark.parametrize("n, dim", [(2, 3), (50, 51), (1, 2)])
def test_space_dimension(n, dim):
    assert make_spin_space(n).dim == dim


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_space_rejects_bad_counts(bad):
    with pytest.raises(InvalidArgumentError):
        make_spin_space(bad)


def test_spin_half_z():
    sz = dense(make_spin_space(1), "z")
    assert np.array_equal(sz, np.diag([0.5, -0.5]))


@pytest.mark.parametrize("n", [1, 2, 4, 5, 20, 33, 50])
def test_commutators_and_casimir(n):
    space = make_spin_space(n)
    sx, sy, sz = (dense(space, a) for a in "xyz")
    for a, b, c in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
        err = np.max(np.abs(a @ b - b @ a - 1j * c)) / np.max(np.abs(c))
        assert err <= 1e-12
    j = n / 2
    casimir = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(casimir - j * (j + 1) * np.eye(space.dim))) <= 1e-12 * j * (j + 1)


def test_casimir_triplet_is_two():
    space = make_spin_space(2)
    sx, sy, sz = (dense(space, a) for a in "xyz")
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, 2 * np.eye(3), atol=1e-14)


@pytest.mark.parametrize("n", [1, 7, 40])
def test_ladder_consistency(n):
    space = make_spin_space(n)
    sx, sy = dense(space, "x"), dense(space, "y")
    assert np.max(np.abs(dense(space, "plus") - (sx + 1j * sy))) <= 1e-15
    assert np.max(np.abs(dense(space, "minus") - (sx - 1j * sy))) <= 1e-15


def test_ladder_matrix_elements():
    space = make_spin_space(5)
    plus = dense(space, "plus")
    j = 2.5
    for k, m in enumerate(space.m_values[1:], start=1):
        assert plus[k - 1, k] == pytest.approx(math.sqrt(j * (j + 1) - m * (m + 1)), abs=1e-14)


def test_large_spaces_are_sparse():
    op = collective_operator(make_spin_space(80), "x")
    assert op.is_sparse
    assert op.hermiticity_error() == 0.0


def test_unknown_axis():
    with pytest.raises(InvalidArgumentError):
        collective_operator(make_spin_space(2), "w")


def test_embed_examples():
    s = make_spin_space(1)
    sz = collective_operator(s, "z")
    assert np.array_equal(np.diag(embed_pair(sz, None, (2, 2)).dense()).real, [0.5, 0.5, -0.5, -0.5])
    assert np.array_equal(embed_pair(None, None, (2, 3)).dense(), np.eye(6))
    vals = np.linalg.eigvalsh(embed_pair(sz, sz, (2, 2)).dense())
    assert np.allclose(sorted(vals), [-0.25, -0.25, 0.25, 0.25], atol=1e-15)


def test_embed_factorizes():
    s, j = make_spin_space(3), make_spin_space(4)
    a, b = collective_operator(s, "x"), collective_operator(j, "y")
    dims = (s.dim, j.dim)
    lhs = (embed_pair(a, None, dims) @ embed_pair(None, b, dims)).dense()
    assert np.max(np.abs(lhs - embed_pair(a, b, dims).dense())) <= 1e-13


def test_embed_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        embed_pair(collective_operator(make_spin_space(2), "x"), None, (4, 2))


def test_operator_arithmetic_dimension_mismatch():
    a = collective_operator(make_spin_space(2), "x")
    b = collective_operator(make_spin_space(3), "x")
    with pytest.raises(DimensionMismatchError):
        a + b


def test_operator_requires_square():
    with pytest.raises(DimensionMismatchError):
        Operator(np.zeros((2, 3)))


def test_css_north_pole():
    space = make_spin_space(6)
    for phi in (0.0, 1.3, -2.0):
        psi = coherent_spin_state(space, 0.0, phi)
        assert np.allclose(psi, np.eye(space.dim)[0], atol=1e-15)


def test_css_along_y_and_x():
    n = 8
    space = make_spin_space(n)
    sx, sy, sz = (dense(space, a) for a in "xyz")
    psi = coherent_spin_state(space, math.pi / 2, math.pi / 2)
    means = [np.vdot(psi, op @ psi).real for op in (sx, sy, sz)]
    assert np.allclose(means, [0, n / 2, 0], atol=1e-12)
    psi = coherent_spin_state(space, math.pi / 2, 0.0)
    var_z = np.vdot(psi, sz @ sz @ psi).real - np.vdot(psi, sz @ psi).real ** 2
    assert var_z == pytest.approx(n / 4, abs=1e-12)


def test_css_points_along_its_direction():
    rng = np.random.default_rng(7)
    space = make_spin_space(11)
    ops = [dense(space, a) for a in "xyz"]
    for theta, phi in rng.uniform([0, -np.pi], [np.pi, np.pi], size=(20, 2)):
        psi = coherent_spin_state(space, theta, phi)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
        mean = [np.vdot(psi, op @ psi).real for op in ops]
        axis = [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
        assert np.allclose(mean, 5.5 * np.array(axis), atol=1e-11)


def test_quantum_state_checks():
    with pytest.raises(InvalidArgumentError):
        QuantumState((2, 2), np.ones(4))
    with pytest.raises(DimensionMismatchError):
        QuantumState((2, 2), np.ones(3) / math.sqrt(3))


def test_partial_trace_product_is_pure():
    s, j = make_spin_space(4), make_spin_space(3)
    u = coherent_spin_state(s, 0.4, 1.1)
    v = coherent_spin_state(j, 2.0, -0.3)
    rho = partial_trace_S(QuantumState.product(u, v))
    assert rho.purity() == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(rho.entries - np.outer(u, u.conj()))) <= 1e-12


def test_partial_trace_bell_state():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    rho = partial_trace_S(QuantumState((2, 2), psi))
    assert rho.purity() == pytest.approx(0.5, abs=1e-12)


def test_partial_trace_random_state_trace():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=15) + 1j * rng.normal(size=15)
    psi /= np.linalg.norm(psi)
    rho = partial_trace_S(QuantumState((5, 3), psi))
    assert abs(np.trace(rho.entries) - 1) <= 1e-12
    assert np.min(np.linalg.eigvalsh(rho.entries)) >= -1e-12


def test_reduced_density_single_factor():
    space = make_spin_space(3)
    psi = coherent_spin_state(space, 1.0, 0.5)
    rho = reduced_density(psi, (4, 1))
    assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-14)


def test_density_matrix_validation():
    with pytest.raises(InvalidArgumentError):
        DensityMatrix(2, np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidArgumentError):
        DensityMatrix(2, np.array([[1.5, 0.0], [0.0, -0.5]]))
