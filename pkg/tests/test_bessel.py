import numpy as np
import pytest
from scipy import special

from coupled_squeezing.bessel import (
    bessel_j,
    first_arch_end,
    first_zero_j0,
    j0,
    j0_arch_minimum,
    solve_bessel_ratio,
)
from coupled_squeezing.errors import InvalidArgumentError, NoSolutionError


@pytest.mark.parametrize("order", [0, 1, 2, 5])
def test_series_matches_scipy(order):
    xs = np.linspace(-12, 12, 241)
    err = max(abs(bessel_j(order, x) - special.jv(order, x)) for x in xs)
    assert err <= 5e-13


def test_series_domain():
    with pytest.raises(InvalidArgumentError):
        j0(12.5)
    with pytest.raises(InvalidArgumentError):
        bessel_j(-1, 1.0)


def test_landmarks_against_scipy():
    assert first_zero_j0() == pytest.approx(special.jn_zeros(0, 1)[0], abs=1e-12)
    assert first_arch_end() == pytest.approx(special.jn_zeros(1, 1)[0], abs=1e-12)
    assert j0_arch_minimum() == pytest.approx(special.j0(special.jn_zeros(1, 1)[0]), abs=1e-12)


def test_target_one_is_zero():
    assert solve_bessel_ratio(1.0) == 0.0


@pytest.mark.parametrize("target", [2 / 3, 1 / 3, 0.0, -1 / 3, -0.4])
def test_residuals(target):
    x = solve_bessel_ratio(target)
    assert abs(j0(x) - target) <= 1e-12
    # independent evaluation
    assert abs(special.j0(x) - target) <= 1e-11
    assert 0.0 <= x <= first_arch_end()


def test_zero_target_is_first_zero():
    x = solve_bessel_ratio(0.0)
    assert x == pytest.approx(special.jn_zeros(0, 1)[0], abs=1e-12)


def test_solution_is_smallest_root():
    x = solve_bessel_ratio(0.5)
    grid = np.linspace(0, x, 400, endpoint=False)
    assert np.all(special.j0(grid) > 0.5)


@pytest.mark.parametrize("target", [1.0001, -0.41, -1.0])
def test_unreachable_targets(target):
    with pytest.raises(NoSolutionError) as info:
        solve_bessel_ratio(target)
    assert info.value.bracket is not None
