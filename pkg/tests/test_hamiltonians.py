import math

import numpy as np
import pytest

from coupled_squeezing import hamiltonians as ham
from coupled_squeezing.bessel import j0
from coupled_squeezing.errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NoSolutionError,
    SingularConditionError,
)
from coupled_squeezing.spin_algebra import collective_operator, embed_pair, make_spin_space


def config(gx=1.0, gy=1.0, gz=1.0, om=100.0, omp=0.0, ns=4, nj=4, **kw):
    return ham.DriveConfig(gx, gy, gz, om, omp, ns, nj, **kw)


def test_two_spin_exchange_spectrum():
    h = ham.build_interaction(config(ns=1, nj=1))
    vals = np.sort(np.linalg.eigvalsh(h.dense()))
    assert np.allclose(vals, [-0.75, 0.25, 0.25, 0.25], atol=1e-14)


@pytest.mark.parametrize("g", [(1.0, 1.0, 1.0), (0.3, -1.2, 2.0), (1.0, 1.0, -2.0)])
def test_interaction_hermitian(g):
    h = ham.build_interaction(config(*g, ns=5, nj=3))
    assert h.hermiticity_error() <= 1e-13


def test_isotropic_conserves_total_z():
    cfg = config(ns=6, nj=5)
    spaces = (make_spin_space(6), make_spin_space(5))
    dims = (7, 6)
    total = embed_pair(collective_operator(spaces[0], "z"), None, dims) + embed_pair(
        None, collective_operator(spaces[1], "z"), dims
    )
    h = ham.build_interaction(cfg, spaces).dense()
    tz = total.dense()
    assert np.max(np.abs(h @ tz - tz @ h)) <= 1e-12


def test_dc_drive():
    d = ham.build_dc_drive(config(om=1.0, omp=2.0, ns=1, nj=1)).dense()
    assert np.max(d.real) == pytest.approx(1.5)
    assert np.count_nonzero(d - np.diag(np.diag(d))) == 0
    zero = ham.build_dc_drive(config(om=0.0, omp=0.0, ns=2, nj=2)).dense()
    assert not np.any(zero)


def test_spaces_must_match():
    with pytest.raises(DimensionMismatchError):
        ham.build_interaction(config(ns=2, nj=2), (make_spin_space(3), make_spin_space(2)))


def test_ac_drive_values():
    cfg = config(ac_amplitude=1.7, ac_frequency=3.0, ac_axis="y")
    drive = ham.build_ac_drive(cfg)
    sy = embed_pair(collective_operator(make_spin_space(4), "y"), None, (5, 5)).dense()
    assert np.allclose(drive.at(0.0).dense(), 1.7 * sy, atol=1e-15)
    assert np.max(np.abs(drive.at(math.pi / 6.0).dense())) <= 1e-15
    t = 0.37
    period = 2 * math.pi / 3.0
    assert np.max(np.abs(drive.at(t).dense() - drive.at(t + period).dense())) <= 1e-13


def test_ac_drive_axis_validation():
    with pytest.raises(InvalidArgumentError):
        ham.build_ac_drive(config(ac_amplitude=1.0, ac_frequency=1.0), axis="q")


def test_drive_config_requires_frequency():
    with pytest.raises(InvalidArgumentError):
        config(ac_amplitude=1.0, ac_frequency=0.0)


def test_fnt_examples():
    assert ham.fnt_coefficients(config(gx=1.0, gy=0.0, om=10.0, omp=0.0)) == pytest.approx((0.1, 0.0))
    cfg = config(om=50.0, omp=-3.0)
    txy, tyx = ham.fnt_coefficients(cfg)
    assert txy == pytest.approx(1 / 53, rel=1e-14)
    assert tyx == pytest.approx(-1 / 53, rel=1e-14)


@pytest.mark.parametrize("g", [(1.0, 1.0), (0.7, -0.2), (1.0, 0.0), (0.0, 2.0)])
def test_fnt_cancels_first_order(g):
    cfg = config(gx=g[0], gy=g[1], om=37.0, omp=-4.5)
    txy, tyx = ham.fnt_coefficients(cfg)
    assert abs(cfg.g_x - txy * cfg.omega_cap - tyx * cfg.omega_prime) <= 1e-12
    assert abs(cfg.g_y + tyx * cfg.omega_cap + txy * cfg.omega_prime) <= 1e-12


def test_singular_drive():
    with pytest.raises(SingularConditionError):
        ham.effective_params(config(om=5.0, omp=-5.0))


def test_isotropic_p_equals_q():
    p = ham.effective_params(config(om=300.0, omp=-7.0, nj=20))
    assert p.p - p.q == 0.0


def test_linear_coefficient_h2_zero_omega_prime():
    # general formula: the 2 g_x g_y Omega cross term survives at Omega' = 0
    g, n, om = 1.0, 20, 500.0
    f = ham.effective_params(config(om=om, omp=0.0, nj=n)).f
    assert f == pytest.approx(g * n / 2 - g * g * n / (4 * om), rel=1e-14)


def _exact_splitting(cfg):
    # N_s = 1 with J at m_j = +j: splitting between S-up and the dressed S-down level
    vals, vecs = np.linalg.eigh(ham.build_static_hamiltonian(cfg).dense())
    up, down = 0, cfg.n_j + 1  # |up, j> and |down, j> in S-first ordering
    return vals[np.argmax(np.abs(vecs[up]) ** 2)] - vals[np.argmax(np.abs(vecs[down]) ** 2)]


@pytest.mark.parametrize("g", [(1.0, 1.0, 1.0), (1.0, 1.0, -2.0), (0.6, 1.1, 0.4)])
def test_linear_coefficient_against_exact_spectrum(g):
    residuals = []
    for om in (400.0, 1600.0):
        cfg = config(*g, om=om, omp=-6.0, ns=1, nj=10)
        residuals.append(abs(_exact_splitting(cfg) - ham.effective_params(cfg).f))
    # what is left over is third order: quartering 1/(Omega - Omega') cuts it ~16x
    assert residuals[0] <= 2e-4
    assert residuals[1] <= residuals[0] / 10


def test_chi_matches_delta():
    cfg = config(om=25.0 * 20 + 0.0, omp=0.0, nj=20)
    p = ham.effective_params(cfg)
    assert p.delta == pytest.approx(50.0)
    assert p.chi_eff == pytest.approx(-0.01, rel=1e-12)
    assert p.chi_eff == pytest.approx(-1.0 / (2.0 * p.delta), rel=1e-14)


def test_chi_single_axis():
    cfg = config(gx=1.0, gy=0.0, gz=0.0, om=80.0, omp=3.0, nj=10)
    p = ham.effective_params(cfg)
    assert p.oat_axis == "x"
    assert p.chi_eff == pytest.approx(10 * 80.0 / (4 * (80.0**2 - 9.0)), rel=1e-14)


def test_validity_ratios():
    p = ham.effective_params(config(om=120.0, omp=-10.0, ns=8, nj=12))
    assert p.validity_s == pytest.approx(8 / 130)
    assert p.validity_j == pytest.approx(12 / 130)
    assert math.isnan(p.rwa_ratio)


def test_effective_params_deterministic():
    cfg = config(gx=0.3, gy=0.9, gz=-0.2, om=77.0, omp=1.25)
    assert ham.effective_params(cfg) == ham.effective_params(cfg)


def test_solve_omega_prime_h1_is_zero():
    cfg = config(gx=1.0, gy=0.0, gz=0.0, om=200.0, nj=20)
    assert ham.solve_omega_prime(cfg) == 0.0


def test_solve_omega_prime_h2():
    cfg = config(om=2000.0, nj=40)
    omp = ham.solve_omega_prime(cfg)
    assert abs(ham.linear_coefficient(cfg.replace(omega_prime=omp))) <= 1e-12 * 2000.0
    # leading order -g N_j / 2, corrected by g^2 N_j / (4 (Omega - Omega'))
    assert omp == pytest.approx(-20.0 + 40 / (4 * (2000.0 - omp)), abs=1e-9)
    assert omp > -20.0


@pytest.mark.parametrize("g", [(1.0, 1.0, 1.0), (1.0, 1.0, -2.0), (0.5, 0.8, 0.3)])
@pytest.mark.parametrize("om", [150.0, 600.0, -400.0])
def test_solve_omega_prime_residual(g, om):
    cfg = config(*g, om=om, nj=16)
    omp = ham.solve_omega_prime(cfg)
    assert abs(ham.linear_coefficient(cfg.replace(omega_prime=omp))) <= 1e-12 * abs(om)


def test_solve_omega_prime_no_root():
    cfg = config(gz=50.0, om=10.0, nj=20)
    with pytest.raises(NoSolutionError) as info:
        ham.solve_omega_prime(cfg)
    assert info.value.bracket == (-5.0, 5.0)


def test_solve_drives_for_delta():
    cfg = config(ns=20, nj=20, om=0.0)
    om, omp = ham.solve_drives_for_delta(50.0, cfg)
    p = ham.effective_params(cfg.replace(omega_cap=om, omega_prime=omp))
    assert p.delta == pytest.approx(50.0, rel=1e-12)
    assert abs(p.f) <= 1e-12 * om


def test_effective_oat():
    h = ham.build_effective_oat(1.0, make_spin_space(2), "z").dense()
    assert np.allclose(h, np.diag([1, 0, 1]), atol=1e-15)
    assert not np.any(ham.build_effective_oat(0.0, make_spin_space(5)).dense())
    assert ham.build_effective_oat(0.3, make_spin_space(9), "x").hermiticity_error() <= 1e-13


def test_effective_tat_identities():
    space = make_spin_space(9)
    chi = -0.7
    h = ham.build_effective_tat(chi, space)
    plus = collective_operator(space, "plus").dense()
    minus = collective_operator(space, "minus").dense()
    assert np.max(np.abs(h.dense() - chi / 6 * (plus @ plus + minus @ minus))) <= 1e-13
    assert abs(np.trace(h.dense())) <= 1e-12
    assert h.hermiticity_error() <= 1e-13
    # rotation by pi/2 about z swaps x and y, negating S_x^2 - S_y^2
    rot = np.diag(np.exp(-1j * math.pi / 2 * space.m_values))
    rotated = rot @ h.dense() @ rot.conj().T
    assert np.max(np.abs(rotated + h.dense())) <= 1e-12


def test_branch_isotropic():
    chi = -0.01
    b = ham.tat_branch_select(-chi, -chi)
    assert b.drive_axis == "y"
    assert b.bessel_target == pytest.approx(-1 / 3)
    assert b.twist_axes == ("x", "y")
    assert b.coefficient == pytest.approx(chi / 3)
    assert b.saddle_axis == "z"


def test_branch_z_examples():
    b = ham.tat_branch_select(1.0, 0.0)
    assert (b.drive_axis, b.bessel_target) == ("z", pytest.approx(-1 / 3))
    # p = 2q: the first z target is -1, outside the arch, so the sign-flipped variant is used
    b = ham.tat_branch_select(2.0, 1.0)
    assert (b.drive_axis, b.variant, b.bessel_target) == ("z", 2, pytest.approx(1.0))


def test_branch_rejects_zero():
    with pytest.raises(InvalidArgumentError):
        ham.tat_branch_select(0.0, 0.0)


@pytest.mark.parametrize("pq", [(1.0, 1.0), (1.0, 0.0), (2.0, 1.0), (1.0, 3.0), (-0.4, 0.9)])
def test_rwa_hamiltonian_reproduces_branch(pq):
    # the drive-averaged quadratic form at the chosen Bessel root equals the branch's TAT form up to a Casimir shift
    p, q = pq
    space = make_spin_space(6)
    b = ham.tat_branch_select(p, q)
    h = ham.build_rwa_hamiltonian(p, q, b.drive_axis, b.bessel_target, space).dense()
    tat = ham.build_twisting(b.coefficient, space, *b.twist_axes).dense()
    diff = h - tat
    shift = np.trace(diff).real / space.dim
    assert np.max(np.abs(diff - shift * np.eye(space.dim))) <= 1e-12
    assert abs(j0(2 * ham.ac_ratio_for(b)) - b.bessel_target) <= 1e-12
