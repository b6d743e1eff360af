import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunneldelay.numerics import (
    Grid1D,
    GridError,
    SampledComplex,
    forward_transform,
    gauss_legendre,
    inverse_transform,
    make_grid,
    next_power_of_two,
    quadrature,
)


def gaussian_field(grid, centre=0.0, width=1.0, k0=0.0):
    x = grid.points
    return SampledComplex(grid, np.exp(-((x - centre) / width) ** 2 + 1j * k0 * x))


def test_grid_points_exclude_right_endpoint():
    g = make_grid(-1.0, 1.0, 8)
    assert g.spacing == 0.25
    assert g.points[0] == -1.0
    assert g.points[-1] == pytest.approx(0.75)


@pytest.mark.parametrize("args", [(0.0, 0.0, 8), (1.0, 0.0, 8), (0.0, 1.0, 12), (0.0, 1.0, 1), (0.0, math.inf, 8)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(GridError):
        make_grid(*args)


def test_conjugate_grid_spans_nyquist_band():
    g = make_grid(-5.0, 5.0, 64)
    kg = g.conjugate()
    assert kg.x_min == pytest.approx(-math.pi / g.spacing)
    assert kg.spacing == pytest.approx(g.k_spacing)


def test_sampled_values_must_match_grid_and_be_finite():
    g = make_grid(0.0, 1.0, 4)
    with pytest.raises(GridError):
        SampledComplex(g, np.zeros(3))
    with pytest.raises(GridError):
        SampledComplex(g, np.array([0, 1, np.nan, 2]))


def test_forward_transform_of_gaussian_matches_closed_form():
    # (2 pi)^-1 int exp(-(x-x0)^2/w^2 + i k0 x) e^{-ikx} dx
    g = make_grid(-20.0, 20.0, 1024)
    x0, w, k0 = 1.5, 1.3, 2.0
    F = forward_transform(gaussian_field(g, x0, w, k0))
    k = F.points
    exact = w / (2.0 * math.sqrt(math.pi)) * np.exp(-((k - k0) * w / 2.0) ** 2 - 1j * (k - k0) * x0)
    assert np.max(np.abs(F.values - exact)) < 1e-12 * np.max(np.abs(exact))
    assert F.origin == g.x_min


def test_inverse_undoes_forward():
    g = make_grid(-7.0, 9.0, 256)
    f = gaussian_field(g, 0.5, 1.0, 3.0)
    back = inverse_transform(forward_transform(f))
    assert back.grid == g
    assert np.max(np.abs(back.values - f.values)) < 1e-13


def test_transform_domain_checks():
    g = make_grid(0.0, 1.0, 8)
    f = SampledComplex(g, np.ones(8))
    with pytest.raises(GridError):
        inverse_transform(f)
    with pytest.raises(GridError):
        forward_transform(forward_transform(f))


def test_quadrature_of_gaussian():
    g = make_grid(-12.0, 12.0, 512)
    assert quadrature(gaussian_field(g)) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("order", [2, 5, 8])
def test_gauss_legendre_exact_for_polynomials(order):
    nodes, weights = gauss_legendre(order)
    for p in range(2 * order):
        assert np.sum(weights * nodes**p) == pytest.approx(1.0 / (p + 1), rel=1e-13)


def test_next_power_of_two():
    assert [next_power_of_two(n) for n in (0, 1, 2, 3, 1000, 1024)] == [1, 1, 2, 4, 1024, 1024]


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(0.5, 2.0),
    st.floats(-4, 4),
    st.sampled_from([128, 256, 512]),
)
def test_parseval(centre, width, k0, n):
    g = Grid1D(-16.0, 16.0, n)
    f = gaussian_field(g, centre, width, k0)
    F = forward_transform(f)
    lhs = np.sum(np.abs(f.values) ** 2) * g.spacing
    rhs = 2.0 * math.pi * np.sum(np.abs(F.values) ** 2) * F.grid.spacing
    assert rhs == pytest.approx(lhs, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(-40, 40))
def test_shift_theorem(cells):
    g = Grid1D(-16.0, 16.0, 256)
    f = gaussian_field(g, 0.0, 1.0, 1.0)
    F = forward_transform(f)
    shifted = SampledComplex(F.grid, F.values * np.exp(-1j * F.points * cells * g.spacing), "k", F.origin)
    back = inverse_transform(shifted).values
    assert np.max(np.abs(back - np.roll(f.values, cells))) < 1e-12
