import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunneldelay.barriers import (
    ComplexBox,
    DomainError,
    DoubleDelta,
    PoleSearchError,
    SingleDelta,
    Tabulated,
    UnsupportedOperation,
    argument_principle_count,
    contour_residue,
    find_poles,
    load_tabulated,
    mirror_poles,
    path_modes,
    reflection_delta,
    residue_at,
    ringing_length,
    transmission_closed,
    transmission_series,
)


def transfer_matrix_transmission(omega, positions, k):
    """Independent oracle: psi'' + k^2 psi = omega sum_j delta(x - x_j) psi.

    Each region carries A e^{ikx} + B e^{-ikx}; across a delta psi is
    continuous and psi' jumps by omega psi.  Returns the amplitude of
    e^{ikx} to the right of all deltas for unit incidence from the left.
    """
    g = omega / (2j * k)
    M = np.eye(2, dtype=complex)
    for x in positions:
        # amplitudes (A, B) of (e^{ikx}, e^{-ikx}) just right of the delta, from those just left
        phase = np.exp(2j * k * x)
        step = np.array([[1 + g, g / phase], [-g * phase, 1 - g]])
        M = step @ M
    # right side (t, 0) = M (1, r); every step has unit determinant, so t = 1/M11
    return 1.0 / M[1, 1]


# --------------------------------------------------------------------- models


@pytest.mark.parametrize("omega", [100.0, 4.0, -4.0])
@pytest.mark.parametrize("k", [0.3, 1.0, 4.4, 17.0])
def test_single_delta_matches_transfer_matrix(omega, k):
    assert SingleDelta(omega).transmission(k) == pytest.approx(transfer_matrix_transmission(omega, [0.0], k), rel=1e-12)


@pytest.mark.parametrize("k", [0.3, 1.4 * math.pi, 3.08, 22.0])
def test_double_delta_is_transfer_matrix_over_one_mirror(k):
    # the adopted model carries one factor (1+R); the two-mirror wave solution carries two
    dd = DoubleDelta(100.0)
    tm = transfer_matrix_transmission(100.0, [0.0, 1.0], k)
    assert dd.transmission(k) * (1.0 + dd.reflection(k)) == pytest.approx(tm, rel=1e-10)


def test_reflection_formula():
    assert reflection_delta(100.0, 2.0) == pytest.approx(-50j / (2.0 + 50j))


def test_free_models_are_transparent():
    k = np.linspace(0.1, 10, 7)
    assert np.all(SingleDelta(0.0).transmission(k) == 1.0)
    assert np.all(DoubleDelta(0.0).transmission(k) == 1.0)


def test_double_delta_at_zero_is_finite():
    dd = DoubleDelta(100.0, 1.0)
    assert dd.transmission(0.0) == pytest.approx(1.0 / (2.0 + 100.0))
    assert dd.transmission(1e-9) == pytest.approx(1.0 / 102.0, rel=1e-6)


def test_single_delta_pole_evaluation_raises():
    with pytest.raises(DomainError):
        SingleDelta(4.0).transmission(-2j)


def test_double_delta_needs_positive_spacing():
    with pytest.raises(ValueError):
        DoubleDelta(10.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-200, 200), st.floats(0.01, 40))
def test_single_delta_passive(omega, k):
    assert abs(SingleDelta(omega).transmission(k)) <= 1.0 + 1e-12


@pytest.mark.xfail(strict=True, reason="the adopted double-delta form exceeds |t| = 1 near resonances")
def test_double_delta_passive():
    k = np.linspace(0.01, 30.0, 30001)
    assert np.max(np.abs(DoubleDelta(100.0).transmission(k))) <= 1.0 + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 500), st.floats(0.01, 40))
def test_double_delta_two_mirror_flux_bounded(omega, k):
    dd = DoubleDelta(omega)
    assert abs((1.0 + dd.reflection(k)) * dd.transmission(k)) <= 1.0 + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(-100, 100), st.floats(0.01, 40), st.floats(-3, 3))
def test_conjugation_symmetry(omega, re_k, im_k):
    k = complex(re_k, im_k)
    for model in (SingleDelta(omega), DoubleDelta(omega)):
        try:
            lhs = model.transmission(-k.conjugate())
            rhs = np.conj(model.transmission(k))
        except DomainError:
            continue
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


# --------------------------------------------------------------------- series


@settings(max_examples=60, deadline=None)
@given(st.floats(1, 300), st.floats(0.05, 30), st.integers(0, 250))
def test_series_remainder_is_geometric(omega, k, M):
    dd = DoubleDelta(omega)
    total, terms = transmission_series(dd, k, M)
    closed = transmission_closed(dd, k)
    q = dd.round_trip(k)
    assert total - closed == pytest.approx(-closed * q ** (M + 1), abs=1e-12 * max(1.0, abs(closed)))
    assert len(terms) == M + 1


def test_series_terms_are_path_modes():
    dd = DoubleDelta(100.0)
    _, terms = transmission_series(dd, 4.4, 5)
    for mode, term in zip(path_modes(dd, 5), terms):
        assert mode(4.4) == pytest.approx(term, rel=1e-13)
        assert mode.delay == 2.0 * mode.m


def test_series_converges_at_high_k():
    dd = DoubleDelta(100.0)
    k = np.array([20.0, 25.0, 30.0])
    total, _ = transmission_series(dd, k, 200)
    assert np.max(np.abs(total - dd.transmission(k)) / np.abs(dd.transmission(k))) < 1e-10


def test_series_rejects_single_delta_and_negative_order():
    with pytest.raises(TypeError):
        transmission_series(SingleDelta(1.0), 1.0, 3)
    with pytest.raises(ValueError):
        transmission_series(DoubleDelta(1.0), 1.0, -1)


def test_path_modes_of_single_mirror():
    modes = path_modes(SingleDelta(3.0), 7)
    assert len(modes) == 1 and modes[0].delay == 0.0


# --------------------------------------------------------------------- tabulated


def test_tabulated_interpolates_and_holds_edges(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("# k, re, im\n0,1,0\n1,0,1\n2,0,0\n")
    model = load_tabulated(path)
    assert model.transmission(0.5) == pytest.approx(0.5 + 0.5j)
    assert model.transmission(5.0) == 0
    assert model.transmission(-1.0) == 1
    with pytest.raises(UnsupportedOperation):
        model.transmission(1.0 + 0.5j)
    with pytest.raises(UnsupportedOperation):
        find_poles(model, ComplexBox(0, 1, -1, 0))


def test_tabulated_validation(tmp_path):
    with pytest.raises(ValueError):
        Tabulated([0.0, 0.0], [1.0, 1.0])
    with pytest.warns(UserWarning):
        Tabulated([0.0, 1.0], [1.0, 1.5])
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n1,1\n")
    with pytest.raises(ValueError):
        load_tabulated(bad)


# --------------------------------------------------------------------- poles


def test_double_delta_poles_in_box():
    dd = DoubleDelta(100.0)
    poles = find_poles(dd, ComplexBox(1e-3, 30.0, -5.0, 0.0))
    assert len(poles) == poles.argument_count == 9
    assert not poles.failures
    first = poles[0]
    assert first.k_n == pytest.approx(3.0800668 - 0.0018568j, abs=1e-6)
    for p in poles:
        assert p.kind == "resonance" and p.k_n.imag < 0
        assert abs(dd.denominator(np.array([p.k_n]))[0]) < 1e-9
        assert p.residue == pytest.approx(residue_at(dd, p.k_n, "contour", radius=1e-4), rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(5, 300))
def test_repulsive_poles_lie_below_axis(omega):
    poles = find_poles(DoubleDelta(omega), ComplexBox(1e-3, 20.0, -6.0, 0.5))
    assert len(poles) == poles.argument_count
    assert all(p.k_n.imag < 0 for p in poles)


@pytest.mark.parametrize("omega", [100.0, 7.0])
def test_single_delta_pole(omega):
    poles = find_poles(SingleDelta(omega), ComplexBox(-1.0, 1.0, -omega, 1.0))
    assert len(poles) == 1
    assert abs(poles[0].k_n - (-0.5j * omega)) < 1e-10
    assert poles[0].residue == pytest.approx(-0.5j * omega)


def test_attractive_single_delta_has_bound_pole():
    poles = find_poles(SingleDelta(-4.0), ComplexBox(-1.0, 1.0, -1.0, 5.0))
    assert len(poles) == 1 and poles[0].kind == "bound"
    assert poles[0].k_n == pytest.approx(2j, abs=1e-12)


def test_pole_on_contour_is_reported():
    with pytest.raises(PoleSearchError):
        find_poles(SingleDelta(4.0), ComplexBox(-1.0, 1.0, -2.0, 1.0))


def test_argument_principle_counts_polynomial_zeros():
    box = ComplexBox(-2, 2, -2, 2)
    assert argument_principle_count(lambda z: (z - 0.5) * (z + 1j) * (z - 3), box) == 2


def test_residue_of_non_pole_raises():
    with pytest.raises(DomainError):
        residue_at(DoubleDelta(100.0), 4.0 - 1j)
    with pytest.raises(DomainError):
        residue_at(SingleDelta(4.0), 1.0, method="contour", radius=0.1)


def test_contour_residue_of_simple_pole():
    assert contour_residue(lambda z: 3.0 / (z - 1j), 1j, 0.1) == pytest.approx(3.0)


def test_mirror_partners():
    dd = DoubleDelta(100.0)
    poles = find_poles(dd, ComplexBox(1e-3, 8.0, -1.0, 0.0))
    both = mirror_poles(poles)
    assert len(both) == 2 * len(poles)
    for p in both[len(poles):]:
        assert abs(dd.denominator(np.array([p.k_n]))[0]) < 1e-9
        assert p.residue == pytest.approx(residue_at(dd, p.k_n), rel=1e-9)


def test_ringing_length_grows_with_reflectivity():
    k = np.array([math.pi])
    weak = ringing_length(DoubleDelta(10.0), k, 1.0, 1e-10)
    strong = ringing_length(DoubleDelta(100.0), k, 1.0, 1e-10)
    assert 0 < weak < strong
    assert ringing_length(DoubleDelta(0.0), k, 1.0) == 0.0
