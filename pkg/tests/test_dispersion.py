import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hgpdc import dispersion as disp
from hgpdc.dispersion import BBO, CrystalSpec, SellmeierSet
from hgpdc.errors import DomainError

# frozen from an independent 30-digit evaluation of the Kato set
N_O_710 = 1.6636484018246025
SNELL_004_166 = 0.066431145151228003
ATAN_01 = 0.099668652491162027
RHO_3297_DEG = 4.2316291582918068


def test_index_o_reference_value():
    assert disp.index_o(BBO, 0.710) == pytest.approx(N_O_710, abs=1e-12)
    assert abs(disp.index_o(BBO, 0.710) - 1.665) < 0.002


def test_index_o_outside_window_names_window():
    with pytest.raises(DomainError, match="0.205"):
        disp.index_o(BBO, 0.15)
    with pytest.raises(DomainError):
        disp.index_o(BBO, 4.0)


def test_normal_dispersion_in_visible():
    lam = np.linspace(0.4, 0.75, 50)
    assert np.all(np.diff(disp.index_o(BBO, lam)) < 0)


@given(st.floats(0.21, 3.4))
def test_index_e_limits(lam):
    assert disp.index_e(BBO, lam, 0.0) == pytest.approx(disp.index_o(BBO, lam), rel=1e-15)
    assert disp.index_e(BBO, lam, math.pi / 2) == pytest.approx(
        disp.index_e_principal(BBO, lam), rel=1e-15
    )


@given(st.floats(0.21, 3.4), st.floats(1e-3, math.pi / 2 - 1e-3))
def test_negative_uniaxial_ordering(lam, theta):
    n = disp.index_e(BBO, lam, theta)
    assert disp.index_e_principal(BBO, lam) < n < disp.index_o(BBO, lam)


def test_index_e_monotone_in_theta():
    n = disp.index_e(BBO, 0.5, np.linspace(0, math.pi / 2, 100))
    assert np.all(np.diff(n) < 0)


def test_index_e_rejects_bad_axis_angle():
    with pytest.raises(DomainError):
        disp.index_e(BBO, 0.5, -0.1)
    with pytest.raises(DomainError):
        disp.index_e(BBO, 0.5, 2.0)


def test_index_e_355_between_principal_indices():
    n = disp.index_e(BBO, 0.355, math.radians(32.97))
    assert disp.index_e_principal(BBO, 0.355) < n < disp.index_o(BBO, 0.355)


@pytest.mark.parametrize("pol,theta", [("o", 0.0), ("e", math.radians(37.5)), ("e", 1.2)])
def test_group_index_matches_finite_difference(pol, theta):
    h = 1e-4  # 0.1 nm
    for lam in np.linspace(0.25, 3.3, 100):
        n = lambda x: disp.index(BBO, pol, x, theta)  # noqa: E731
        fd = n(lam) - lam * (n(lam + h) - n(lam - h)) / (2 * h)
        assert disp.group_index(BBO, pol, lam, theta) == pytest.approx(fd, rel=1e-6)


def test_group_index_exceeds_phase_index_in_visible():
    lam = np.linspace(0.4, 0.8, 20)
    assert np.all(disp.group_index(BBO, "o", lam) > disp.index_o(BBO, lam))


def test_group_index_margin():
    with pytest.raises(DomainError):
        disp.group_index(BBO, "o", 0.2055)
    with pytest.raises(DomainError):
        disp.group_index(BBO, "x", 0.5)


def test_gvm_group_indices_meet_near_533():
    ng_p = disp.group_index(BBO, "e", 0.400, math.radians(37.5))
    assert disp.group_index(BBO, "o", 0.5335) == pytest.approx(ng_p, abs=1e-3)


def test_walkoff_zero_at_principal_axes():
    assert disp.walkoff_angle(BBO, 0.5, 0.0) == 0.0
    assert disp.walkoff_angle(BBO, 0.5, math.pi / 2) == pytest.approx(0.0, abs=1e-16)


def test_walkoff_reference_value():
    rho = math.degrees(disp.walkoff_angle(BBO, 0.355, math.radians(32.97)))
    assert rho == pytest.approx(RHO_3297_DEG, abs=1e-9)
    assert abs(rho - 4.0) <= 0.5


@given(st.floats(0.21, 3.4), st.floats(1e-3, math.pi / 2 - 1e-3))
def test_walkoff_positive_and_small(lam, theta):
    rho = disp.walkoff_angle(BBO, lam, theta)
    assert 0 < rho < 0.2


@given(st.floats(0.22, 2.0), st.floats(0.05, 1.5))
def test_walkoff_matches_index_derivative(lam, theta):
    # tan(rho) = -(1/n) dn/dtheta
    h = 1e-5
    dn = (disp.index_e(BBO, lam, theta + h) - disp.index_e(BBO, lam, theta - h)) / (2 * h)
    expected = -dn / disp.index_e(BBO, lam, theta)
    assert math.tan(disp.walkoff_angle(BBO, lam, theta)) == pytest.approx(expected, abs=1e-6)


def test_walkoff_direction_flag():
    assert disp.walkoff_direction(BBO) == 1
    positive = CrystalSpec("pos", BBO.sellmeier_e, BBO.sellmeier_o, BBO.window)
    assert disp.walkoff_direction(positive) == -1


def test_snell_examples():
    assert disp.snell_external(0.0, 1.66) == 0.0
    assert disp.snell_external(0.04, 1.66) == pytest.approx(SNELL_004_166, abs=1e-15)


@given(st.floats(-0.6, 0.6), st.floats(1.0, 2.5))
def test_snell_round_trip(theta, n):
    assume(n * abs(math.sin(theta)) < 0.999)
    back = disp.snell_internal(disp.snell_external(theta, n), n)
    assert abs(back - theta) < 1e-12


def test_snell_total_internal_reflection():
    with pytest.raises(DomainError):
        disp.snell_external(1.2, 1.66)
    with pytest.raises(DomainError):
        disp.snell_internal(1.2, 0.5)


def test_detector_angle():
    assert disp.detector_angle(0.0, 0.026) == 0.0
    assert disp.detector_angle(0.026, 0.026) == pytest.approx(math.pi / 4)
    assert disp.detector_angle(2.6e-3, 26e-3) == pytest.approx(ATAN_01, abs=1e-15)
    x = np.linspace(-0.01, 0.01, 11)
    assert np.allclose(disp.detector_angle(-x, 0.026), -disp.detector_angle(x, 0.026))
    with pytest.raises(DomainError):
        disp.detector_angle(1.0, 0.0)


def test_crystal_validation():
    s = SellmeierSet(2.7, 0.02, 0.05, 0.01)
    with pytest.raises(DomainError, match="pole"):
        CrystalSpec("bad", s, s, (0.2, 3.0))
    with pytest.raises(DomainError, match="below 1"):
        CrystalSpec("bad", SellmeierSet(0.5, 0.0, 0.0, 0.0), s, (0.3, 3.0))
    with pytest.raises(DomainError):
        CrystalSpec("bad", BBO.sellmeier_o, BBO.sellmeier_e, (1.0, 0.5))


def test_kz_extraordinary_matches_direction_index():
    # a plane wave at internal angle t has axis angle theta_c + t
    theta_c, lam = math.radians(37.5), 0.6
    for t in np.linspace(-0.2, 0.2, 9):
        k = disp.wavenumber(lam) * disp.index_e(BBO, lam, theta_c + t)
        q = k * math.sin(t)
        assert disp.kz_extraordinary(BBO, lam, q, theta_c) == pytest.approx(k * math.cos(t), rel=1e-13)


def test_kz_evanescent_is_nan():
    k = disp.wavenumber(0.5) * disp.index_o(BBO, 0.5)
    assert np.isnan(disp.kz_ordinary(BBO, 0.5, 1.01 * k))
