import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from sphereflow import exact
from sphereflow.exact import (
    VortexPairParams,
    azimuthal_velocity,
    gradient_modulus_function,
    hemisphere_vorticity_integral,
    streamfunction_profile,
    vorticity_profile,
)
from sphereflow.grid import GridSpec, build_grid
from sphereflow.operators import laplace_beltrami_fd, vorticity_from_velocity

from conftest import band_max

P1 = VortexPairParams(k1=1.0, k2=0.0)
CATALAN = 0.915965594177219015


@pytest.mark.parametrize("k1,k2", [(1.0, 0.0), (-2.0, 0.5), (0.0, 3.0)])
def test_vorticity_at_equator_is_offset(k1, k2):
    assert vorticity_profile(math.pi / 2, VortexPairParams(k1, k2)) == pytest.approx(
        k2, abs=1e-14
    )


@given(st.floats(min_value=0.01, max_value=math.pi - 0.01))
def test_vorticity_mirror_sum(theta):
    p = VortexPairParams(k1=1.3, k2=-0.7)
    total = vorticity_profile(theta, p) + vorticity_profile(math.pi - theta, p)
    assert total == pytest.approx(2 * p.k2, abs=1e-12)


def test_vorticity_reference_value():
    # direct evaluation, cross-checked by integrating d(omega)/d(theta) = 1/sin
    got = vorticity_profile(math.pi / 3, P1)
    assert got == pytest.approx(math.log(math.tan(math.pi / 6)), abs=1e-15)
    ode, _ = quad(lambda t: 1.0 / math.sin(t), math.pi / 2, math.pi / 3)
    assert got == pytest.approx(ode, abs=1e-10)
    assert got == pytest.approx(-0.5493061443340548, abs=1e-12)


@pytest.mark.parametrize("theta", [0.0, math.pi, -1.0])
def test_profile_pole_singularity(theta):
    with pytest.raises(ValueError):
        vorticity_profile(theta, P1)
    with pytest.raises(ValueError):
        azimuthal_velocity(theta, P1)


def test_velocity_at_equator():
    # closed form: I(pi/2) = -log 2
    assert azimuthal_velocity(math.pi / 2, P1) == pytest.approx(-math.log(2.0), abs=1e-12)
    oracle, _ = quad(lambda s: math.sin(s) * math.log(math.tan(s / 2)), 0.0, math.pi / 2)
    assert azimuthal_velocity(math.pi / 2, P1) == pytest.approx(oracle, abs=1e-8)


def test_velocity_quadrature_oracle_random_points():
    rng = np.random.default_rng(12)
    for theta in rng.uniform(0.05, math.pi - 0.05, size=8):
        oracle, _ = quad(lambda s: math.sin(s) * math.log(math.tan(s / 2)), 0.0, theta)
        got = azimuthal_velocity(theta, P1)
        assert got == pytest.approx(oracle / math.sin(theta), abs=1e-9)


def test_velocity_equatorial_symmetry():
    thetas = np.linspace(0.05, math.pi / 2, 40)
    north = azimuthal_velocity(thetas, P1)
    south = azimuthal_velocity(math.pi - thetas, P1)
    assert np.max(np.abs(north - south)) < 1e-12


def test_velocity_series_continuity_at_threshold():
    # closed form and series must agree through the switching point
    eps = np.array([0.5e-4, 0.9e-4, 1.1e-4, 2e-4])
    closed = P1.k1 * exact._velocity_integral_closed(eps) / np.sin(eps)
    series = P1.k1 * exact._velocity_integral_series(eps) / np.sin(eps)
    assert np.max(np.abs(closed - series)) < 1e-10
    for theta in (math.pi - 0.9e-4, math.pi - 1.1e-4):
        assert azimuthal_velocity(theta, P1) == pytest.approx(
            azimuthal_velocity(math.pi - theta, P1), abs=1e-12
        )


def test_velocity_pole_behavior():
    # asymptotically -(k1) [ (theta/2) log(theta/2) + theta/4 ] -> 0
    for theta in (1e-3, 1e-4, 1e-5):
        series = -(0.5 * theta * math.log(0.5 * theta) - 0.25 * theta)
        assert abs(azimuthal_velocity(theta, P1)) == pytest.approx(series, rel=1e-3)
    assert abs(azimuthal_velocity(1e-4, P1)) < 1e-3
    assert abs(azimuthal_velocity(1e-3, P1)) < 5e-3


def test_velocity_extremum_at_equator():
    thetas = np.linspace(0.01, math.pi - 0.01, 2001)
    u = np.abs(azimuthal_velocity(thetas, P1))
    assert np.argmax(u) == 1000  # midpoint of the symmetric sample
    assert u.max() == pytest.approx(math.log(2.0), abs=1e-10)


def test_streamfunction_gauge_and_monotonicity():
    thetas = np.linspace(1e-3, math.pi - 1e-3, 200)
    psi = streamfunction_profile(thetas, P1)
    assert abs(psi[0]) < 1e-5  # gauge psi -> 0 at the north pole
    assert np.all(np.diff(psi) > 0.0)  # u_phi <= 0 for k1 = 1


def test_streamfunction_derivative_is_minus_velocity():
    h = 1e-5
    for theta in (0.4, 1.1, 2.2, 2.9):
        slope = (
            streamfunction_profile(theta + h, P1) - streamfunction_profile(theta - h, P1)
        ) / (2 * h)
        assert slope == pytest.approx(-azimuthal_velocity(theta, P1), abs=1e-8)


def test_streamfunction_scalar_and_array_agree():
    thetas = np.array([0.3, 2.0, 1.1])
    arr = streamfunction_profile(thetas, P1)
    for t, v in zip(thetas, arr):
        assert streamfunction_profile(float(t), P1) == pytest.approx(v, abs=1e-13)


def test_discrete_poisson_relation():
    # -lap(psi) recovers omega at second order on the pole-excluding band
    p = VortexPairParams(k1=1.0, k2=0.0)
    errs = []
    for nlat in (64, 128):
        g = build_grid(GridSpec(nlat=nlat, nlon=8))
        psi = exact.streamfunction_field(p, g)
        omega = exact.vorticity_field(p, g)
        lap = laplace_beltrami_fd(psi)
        errs.append(
            band_max(type(psi)(g, -lap.values - omega.values))
        )
    assert errs[0] < 1e-2
    assert errs[1] < 0.35 * errs[0]


def test_velocity_field_consistency_chain():
    # curl of (0, u_phi) reproduces the vorticity profile
    p = VortexPairParams(k1=1.0, k2=0.0)
    g = build_grid(GridSpec(nlat=128, nlon=8))
    omega = vorticity_from_velocity(exact.velocity_field(p, g))
    expected = exact.vorticity_field(p, g)
    assert band_max(type(expected)(g, omega.values - expected.values)) < 3e-3


def test_hemisphere_integrals_vortex_pair():
    north = hemisphere_vorticity_integral(P1, "north")
    south = hemisphere_vorticity_integral(P1, "south")
    assert north == pytest.approx(-2 * math.pi * math.log(2.0), abs=1e-9)
    assert south == pytest.approx(2 * math.pi * math.log(2.0), abs=1e-9)
    assert north + south == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("k2", [-1.0, 0.5, 2.0])
def test_hemisphere_integrals_offset_only(k2):
    p = VortexPairParams(k1=0.0, k2=k2)
    assert hemisphere_vorticity_integral(p, "north") == pytest.approx(
        2 * math.pi * k2, abs=1e-10
    )


@pytest.mark.parametrize("k1,k2", [(1.0, 0.5), (-2.0, -1.0)])
def test_hemispheres_sum_to_total(k1, k2):
    p = VortexPairParams(k1=k1, k2=k2)
    total = hemisphere_vorticity_integral(p, "north") + hemisphere_vorticity_integral(
        p, "south"
    )
    assert total == pytest.approx(4 * math.pi * k2, abs=1e-8)


def test_hemisphere_without_area_element():
    # the bare d(theta) d(phi) measure gives Catalan's constant instead
    got = hemisphere_vorticity_integral(P1, "north", area_element=False)
    assert got == pytest.approx(-4 * math.pi * CATALAN, abs=1e-8)
    offset = hemisphere_vorticity_integral(
        VortexPairParams(0.0, 2.0), "south", area_element=False
    )
    assert offset == pytest.approx(2.0 * math.pi**2, abs=1e-8)


def test_hemisphere_rejects_unknown_name():
    with pytest.raises(ValueError):
        hemisphere_vorticity_integral(P1, "equator")


def test_gradient_modulus_function_values():
    assert gradient_modulus_function(0.0, P1) == pytest.approx(1.0, abs=1e-15)
    w = np.linspace(-2, 2, 11)
    phi = gradient_modulus_function(w, P1)
    assert np.max(np.abs(phi - gradient_modulus_function(-w, P1))) == 0.0
    p3 = VortexPairParams(k1=-3.0, k2=0.0)
    assert gradient_modulus_function(0.0, p3) == pytest.approx(9.0, abs=1e-12)


@pytest.mark.parametrize("p", [VortexPairParams(0.0, 0.0), VortexPairParams(1.0, 0.1)])
def test_gradient_modulus_function_invalid_params(p):
    with pytest.raises(ValueError):
        gradient_modulus_function(0.0, p)


def test_vorticity_field_antisymmetric_rows():
    g = build_grid(GridSpec(nlat=32, nlon=8))
    values = exact.vorticity_field(P1, g).values
    assert np.max(np.abs(values + values[::-1, :])) < 1e-12
