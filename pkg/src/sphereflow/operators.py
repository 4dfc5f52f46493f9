"""Pointwise differential operators on sphere grids.

Sign conventions, used consistently everywhere in this package:

    u_theta = (1/sin(theta)) dpsi/dphi
    u_phi   = -dpsi/dtheta
    omega   = curl_r(u) = (1/sin(theta)) [d(sin(theta) u_phi)/dtheta - du_theta/dphi]
            = -lap(psi)

Longitude derivatives are centered and periodic.  Colatitude stencils are
three-point and handle arbitrary node placement (Gauss-Legendre grids are not
uniform); the first and last rows fall back to shifted three-point stencils.
The Laplace-Beltrami operator is discretized in the conformal latitude
chi = log(tan(theta/2)), where it reduces to a plain Laplacian scaled by
1/sin^2(theta).  This keeps the stencil second-order on any node placement
and makes it exact on functions linear in chi, in particular on the
vortex-pair vorticity profile.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .grid import Grid, ScalarField, _readonly


@dataclasses.dataclass(frozen=True)
class VelocityField:
    """Tangential velocity components on a :class:`Grid`."""

    grid: Grid
    u_theta: np.ndarray
    u_phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_theta", _readonly(self.u_theta))
        object.__setattr__(self, "u_phi", _readonly(self.u_phi))
        shape = (self.grid.nlat, self.grid.nlon)
        if self.u_theta.shape != shape or self.u_phi.shape != shape:
            raise ValueError("velocity component shapes do not match the grid")
        if not (np.all(np.isfinite(self.u_theta)) and np.all(np.isfinite(self.u_phi))):
            raise ValueError("velocity components must be finite on a pole-free grid")


def _require_same_grid(a, b) -> Grid:
    ga, gb = a.grid, b.grid
    if ga is gb:
        return ga
    same = (
        ga.thetas.shape == gb.thetas.shape
        and ga.phis.shape == gb.phis.shape
        and np.array_equal(ga.thetas, gb.thetas)
        and np.array_equal(ga.phis, gb.phis)
    )
    if not same:
        raise ValueError("fields live on different grids")
    return ga


def _dphi_values(values: np.ndarray, dphi: float) -> np.ndarray:
    """Centered periodic longitude derivative; exactly zero on zonal rows."""
    return (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2.0 * dphi)


def _first_derivative_coeffs(x: np.ndarray):
    """Three-point first-derivative weights on arbitrary nodes.

    Interior rows are centered; the end rows use the shifted stencil over the
    first (last) three nodes.  All stencils are exact for quadratics.  Only
    the outer weights are returned: stencils are applied in difference form,
    which annihilates constants exactly.
    """
    n = x.size
    cm = np.zeros(n)
    cp = np.zeros(n)
    a = x[1:-1] - x[:-2]
    b = x[2:] - x[1:-1]
    cm[1:-1] = -b / (a * (a + b))
    cp[1:-1] = a / (b * (a + b))
    # end rows: derivative at the edge node, expanded about its neighbour
    h1, h2 = x[1] - x[0], x[2] - x[1]
    cm[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2))
    cp[0] = -h1 / (h2 * (h1 + h2))
    g1, g2 = x[-1] - x[-2], x[-2] - x[-3]
    cm[-1] = g1 / (g2 * (g1 + g2))
    cp[-1] = (2.0 * g1 + g2) / (g1 * (g1 + g2))
    return cm, cp


def _second_derivative_coeffs(x: np.ndarray):
    """Three-point second-derivative weights on arbitrary nodes.

    End rows carry the curvature of the quadratic through the first (last)
    three nodes.  Same difference-form contract as the first derivative.
    """
    n = x.size
    cm = np.zeros(n)
    cp = np.zeros(n)
    a = x[1:-1] - x[:-2]
    b = x[2:] - x[1:-1]
    cm[1:-1] = 2.0 / (a * (a + b))
    cp[1:-1] = 2.0 / (b * (a + b))
    h1, h2 = x[1] - x[0], x[2] - x[1]
    cm[0] = 2.0 / (h1 * (h1 + h2))
    cp[0] = 2.0 / (h2 * (h1 + h2))
    g1, g2 = x[-1] - x[-2], x[-2] - x[-3]
    cm[-1] = 2.0 / (g2 * (g1 + g2))
    cp[-1] = 2.0 / (g1 * (g1 + g2))
    return cm, cp


def _apply_row_stencil(values: np.ndarray, coeffs) -> np.ndarray:
    # difference form c_minus (f_- - f_0) + c_plus (f_+ - f_0): the center
    # weight is implied, and constant fields map to exact zero
    cm, cp = (c[:, None] for c in coeffs)
    out = np.empty_like(values)
    out[1:-1] = cm[1:-1] * (values[:-2] - values[1:-1]) + cp[1:-1] * (
        values[2:] - values[1:-1]
    )
    out[0] = cm[0, 0] * (values[0] - values[1]) + cp[0, 0] * (values[2] - values[1])
    out[-1] = cm[-1, 0] * (values[-3] - values[-2]) + cp[-1, 0] * (
        values[-1] - values[-2]
    )
    return out


def _dtheta_values(values: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    return _apply_row_stencil(values, _first_derivative_coeffs(thetas))


def longitude_derivative(f: ScalarField) -> ScalarField:
    """d f / d phi by centered periodic differences."""
    return ScalarField(f.grid, _dphi_values(f.values, f.grid.dphi))


def colatitude_derivative(f: ScalarField) -> ScalarField:
    """d f / d theta by three-point stencils (shifted at the end rows)."""
    return ScalarField(f.grid, _dtheta_values(f.values, f.grid.thetas))


def velocity_from_streamfunction(psi: ScalarField, method: str = "fd", plan=None) -> VelocityField:
    """Rotated surface gradient of the streamfunction.

    ``method="fd"`` differentiates on the grid; ``method="spectral"`` expands
    psi in spherical harmonics first (requires a transform ``plan`` on the
    same grid) and evaluates exact derivatives of the truncated expansion.
    """
    g = psi.grid
    if method == "fd":
        dpsi_dphi = _dphi_values(psi.values, g.dphi)
        dpsi_dtheta = _dtheta_values(psi.values, g.thetas)
    elif method == "spectral":
        if plan is None:
            raise ValueError("spectral derivatives need a transform plan")
        from . import spharm

        coeffs = spharm.analyze(psi, plan)
        dpsi_dtheta, dpsi_dphi = spharm.synthesize_gradient(coeffs, plan)
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    s = g.sin_thetas[:, None]
    return VelocityField(grid=g, u_theta=dpsi_dphi / s, u_phi=-dpsi_dtheta)


def vorticity_from_velocity(u: VelocityField) -> ScalarField:
    """Radial curl (1/sin)[d(sin u_phi)/dtheta - du_theta/dphi]."""
    g = u.grid
    s = g.sin_thetas[:, None]
    curl = _dtheta_values(s * u.u_phi, g.thetas) - _dphi_values(u.u_theta, g.dphi)
    return ScalarField(g, curl / s)


def laplace_beltrami_fd(f: ScalarField) -> ScalarField:
    """Second-order Laplace-Beltrami operator on the grid.

    Computed as (1/sin^2) (d^2/dchi^2 + d^2/dphi^2) with three-point stencils
    over the node images chi_i = log(tan(theta_i/2)); equivalent to the
    divergence form (1/sin) d/dtheta (sin d/dtheta) + (1/sin^2) d^2/dphi^2.
    """
    g = f.grid
    d2chi = _apply_row_stencil(f.values, _second_derivative_coeffs(g.chis))
    v = f.values
    d2phi = (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / g.dphi**2
    return ScalarField(g, (d2chi + d2phi) / g.sin_thetas[:, None] ** 2)


def jacobian(psi: ScalarField, omega: ScalarField) -> ScalarField:
    """Advection bracket psi_phi * omega_theta - psi_theta * omega_phi.

    The metric prefactor 1/sin(theta) is left to the caller (see
    :func:`ns_residual`).  Identically zero when both fields are zonal,
    because the longitude differences vanish exactly.
    """
    g = _require_same_grid(psi, omega)
    bracket = _dphi_values(psi.values, g.dphi) * _dtheta_values(omega.values, g.thetas) - _dtheta_values(
        psi.values, g.thetas
    ) * _dphi_values(omega.values, g.dphi)
    return ScalarField(g, bracket)


def ns_residual(psi: ScalarField, omega: ScalarField, nu: float) -> ScalarField:
    """Stationary vorticity-equation residual (1/sin) J(psi, omega) - nu * lap(omega).

    A zero field means the pair is a stationary solution at the discrete
    level; nu = 0 gives the inviscid residual.
    """
    if nu < 0.0:
        raise ValueError("viscosity must be nonnegative")
    g = _require_same_grid(psi, omega)
    adv = jacobian(psi, omega).values / g.sin_thetas[:, None]
    if nu == 0.0:
        return ScalarField(g, adv)
    return ScalarField(g, adv - nu * laplace_beltrami_fd(omega).values)


def mercator_laplacian(values: np.ndarray, chi_step: float, phi_step: float) -> np.ndarray:
    """Five-point Laplacian on a uniform (chi, phi) rectangle, periodic in phi.

    Relates to :func:`laplace_beltrami_fd` through the conformal factor:
    sin^2(theta) * lap(f) equals this operator with sin(theta) = sech(chi).
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 3:
        raise ValueError("need a 2-D sample array with at least 3 chi rows")
    out = np.empty_like(v)
    out[1:-1] = v[:-2] - 2.0 * v[1:-1] + v[2:]
    out[0] = v[0] - 2.0 * v[1] + v[2]
    out[-1] = v[-3] - 2.0 * v[-2] + v[-1]
    out /= chi_step**2
    out += (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / phi_step**2
    return out
