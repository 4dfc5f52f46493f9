import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from sphereflow import exact
from sphereflow.grid import (
    Grid,
    GridSpec,
    ScalarField,
    build_grid,
    cell_weights,
    colatitude_of_mercator,
    grid_from_colatitudes,
    mercator_of_colatitude,
    read_scalar_field,
    surface_integral,
    write_scalar_field,
)

from conftest import zonal_field


@pytest.mark.parametrize("kind", ["gauss-legendre", "uniform-interior"])
@pytest.mark.parametrize("nlat,nlon", [(4, 8), (16, 4), (64, 128)])
def test_grid_invariants(kind, nlat, nlon):
    g = build_grid(GridSpec(nlat=nlat, nlon=nlon, kind=kind))
    assert abs(float(g.weights.sum()) - 2.0) <= 1e-12
    assert np.all(g.weights > 0.0)
    assert np.all(np.diff(g.thetas) > 0.0)
    assert g.thetas[0] > 0.0 and g.thetas[-1] < np.pi
    assert np.allclose(g.phis, 2 * np.pi * np.arange(nlon) / nlon, atol=0, rtol=0)


def test_uniform_grid_is_half_cell_offset():
    g = build_grid(GridSpec(nlat=8, nlon=4, kind="uniform-interior"))
    h = np.pi / 8
    assert np.allclose(g.thetas, (np.arange(8) + 0.5) * h, atol=1e-15, rtol=0)


def test_gauss_nodes_are_legendre_roots():
    from scipy.special import eval_legendre

    g = build_grid(GridSpec(nlat=24, nlon=4))
    assert np.max(np.abs(eval_legendre(24, np.cos(g.thetas)))) < 1e-13


def test_gauss_quadrature_polynomial_exactness():
    # exact for cos^k(theta) through degree 2*nlat - 1
    g = build_grid(GridSpec(nlat=16, nlon=4))
    for k in range(2 * 16):
        analytic = 2.0 * np.pi * (1.0 + (-1.0) ** k) / (k + 1.0)
        got = surface_integral(zonal_field(g, g.cos_thetas**k))
        assert abs(got - analytic) <= 1e-12, k


def test_cos_squared_area_integral():
    g = build_grid(GridSpec(nlat=16, nlon=8))
    got = surface_integral(zonal_field(g, g.cos_thetas**2))
    assert abs(got - 4.0 * np.pi / 3.0) <= 1e-12


def test_surface_integral_constants(gl_grid):
    ones = ScalarField(gl_grid, np.ones((gl_grid.nlat, gl_grid.nlon)))
    assert abs(surface_integral(ones) - 4.0 * np.pi) <= 1e-12
    assert abs(surface_integral(zonal_field(gl_grid, gl_grid.cos_thetas))) <= 1e-13


def test_vortex_vorticity_integrates_to_zero():
    # oracle: adaptive quadrature of the zonal profile with the area element
    p = exact.VortexPairParams(k1=1.0, k2=0.0)
    oracle, _ = quad(lambda t: math.log(math.tan(t / 2)) * math.sin(t), 0.0, np.pi)
    assert abs(oracle) <= 1e-10
    g = build_grid(GridSpec(nlat=64, nlon=8))
    assert abs(surface_integral(exact.vorticity_field(p, g))) <= 1e-8


def test_mercator_equator_is_zero():
    assert mercator_of_colatitude(np.pi / 2) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(min_value=0.01, max_value=math.pi - 0.01))
def test_mercator_odd_about_equator(theta):
    assert mercator_of_colatitude(math.pi - theta) == pytest.approx(
        -mercator_of_colatitude(theta), abs=1e-12
    )


@given(st.floats(min_value=0.01, max_value=math.pi - 0.01))
def test_mercator_round_trip(theta):
    assert colatitude_of_mercator(mercator_of_colatitude(theta)) == pytest.approx(
        theta, abs=1e-14
    )


@given(st.floats(min_value=-30.0, max_value=30.0))
def test_inverse_map_stays_interior_and_monotone(chi):
    theta = colatitude_of_mercator(chi)
    assert 0.0 < theta < math.pi
    assert colatitude_of_mercator(chi + 0.5) > theta


@pytest.mark.parametrize("theta", [0.0, -0.3, np.pi, 3.5])
def test_mercator_pole_domain_error(theta):
    with pytest.raises(ValueError):
        mercator_of_colatitude(theta)


def test_sech_identity_on_nodes():
    # sin(theta) = sech(chi), the corrected conformal-factor identity
    for kind in ("gauss-legendre", "uniform-interior"):
        g = build_grid(GridSpec(nlat=96, nlon=4, kind=kind))
        assert np.max(np.abs(g.sin_thetas - 1.0 / np.cosh(g.chis))) < 1e-13


@pytest.mark.parametrize("nlat,nlon", [(3, 8), (8, 3), (0, 0)])
def test_invalid_spec_rejected(nlat, nlon):
    with pytest.raises(ValueError):
        GridSpec(nlat=nlat, nlon=nlon)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        GridSpec(nlat=8, nlon=8, kind="icosahedral")


def test_field_shape_mismatch_rejected(gl_grid):
    with pytest.raises(ValueError):
        ScalarField(gl_grid, np.zeros((3, 3)))


def test_grid_arrays_are_immutable(gl_grid):
    with pytest.raises(ValueError):
        gl_grid.thetas[0] = 1.0


def test_cell_weights_telescope_exactly():
    thetas = np.sort(np.random.default_rng(0).uniform(0.05, np.pi - 0.05, size=33))
    w = cell_weights(thetas)
    assert np.all(w > 0.0)
    assert float(w.sum()) == pytest.approx(2.0, abs=1e-15)
    g = grid_from_colatitudes(thetas, 8)
    assert g.nlat == 33


def test_scalar_field_csv_round_trip(tmp_path):
    g = build_grid(GridSpec(nlat=6, nlon=5))
    rng = np.random.default_rng(1)
    f = ScalarField(g, rng.standard_normal((6, 5)))
    path = tmp_path / "field.csv"
    write_scalar_field(f, path)
    thetas, phis, values = read_scalar_field(path)
    assert np.array_equal(thetas, g.thetas)
    assert np.array_equal(phis, g.phis)
    assert np.array_equal(values, f.values)


def test_weights_must_sum_to_two():
    thetas = np.linspace(0.3, np.pi - 0.3, 8)
    with pytest.raises(ValueError):
        Grid(thetas=thetas, phis=2 * np.pi * np.arange(8) / 8, weights=np.ones(8))
