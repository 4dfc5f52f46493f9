"""Quadrature grids on the unit sphere and the conformal (Mercator) latitude.

Colatitude theta runs from 0 at the north pole to pi at the south pole and
longitude phi is periodic with period 2*pi.  Poles are never grid nodes:
the vortex-pair vorticity this package is built around diverges there.
Quadrature weights are defined against the measure sin(theta) dtheta, so a
weighted sum over nodes approximates the surface integral directly.
"""

from __future__ import annotations

import dataclasses
import functools

import numpy as np
from scipy.special import roots_legendre

GAUSS_LEGENDRE = "gauss-legendre"
UNIFORM_INTERIOR = "uniform-interior"
_KINDS = (GAUSS_LEGENDRE, UNIFORM_INTERIOR)

#: Colatitude band on which pole-sensitive checks are evaluated by default.
DEFAULT_BAND = (np.pi / 8, 7 * np.pi / 8)


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Resolution and node-placement recipe for a sphere grid."""

    nlat: int
    nlon: int
    kind: str = GAUSS_LEGENDRE

    def __post_init__(self):
        if self.nlat < 4 or self.nlon < 4:
            raise ValueError(
                f"grid needs nlat >= 4 and nlon >= 4, got {self.nlat} x {self.nlon}"
            )
        if self.kind not in _KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r}; expected one of {_KINDS}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True)
class Grid:
    """Colatitude-longitude nodes with quadrature weights.

    Attributes
    ----------
    thetas : ndarray, shape (nlat,)
        Strictly increasing colatitudes, all inside the open interval (0, pi).
    phis : ndarray, shape (nlon,)
        Uniform longitudes phi_j = 2*pi*j/nlon.
    weights : ndarray, shape (nlat,)
        Positive weights with sum(w_i * f(theta_i)) ~ int_0^pi f sin(theta) dtheta,
        so the weights sum to 2.
    """

    thetas: np.ndarray
    phis: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "thetas", _readonly(self.thetas))
        object.__setattr__(self, "phis", _readonly(self.phis))
        object.__setattr__(self, "weights", _readonly(self.weights))
        t, w = self.thetas, self.weights
        if t.ndim != 1 or t.size < 4:
            raise ValueError("need at least 4 colatitude nodes")
        if t[0] <= 0.0 or t[-1] >= np.pi or np.any(np.diff(t) <= 0.0):
            raise ValueError("colatitudes must be strictly increasing inside (0, pi)")
        if w.shape != t.shape or np.any(w <= 0.0):
            raise ValueError("weights must be positive, one per colatitude")
        if abs(float(w.sum()) - 2.0) > 1e-12:
            raise ValueError(f"weights must sum to 2, got {w.sum()!r}")
        p = self.phis
        if p.ndim != 1 or p.size < 4:
            raise ValueError("need at least 4 longitude nodes")
        expected = 2.0 * np.pi * np.arange(p.size) / p.size
        if not np.allclose(p, expected, rtol=0.0, atol=1e-12):
            raise ValueError("longitudes must be uniform with phi_j = 2*pi*j/nlon")

    @property
    def nlat(self) -> int:
        return self.thetas.size

    @property
    def nlon(self) -> int:
        return self.phis.size

    @property
    def dphi(self) -> float:
        return 2.0 * np.pi / self.nlon

    @functools.cached_property
    def sin_thetas(self) -> np.ndarray:
        return _readonly(np.sin(self.thetas))

    @functools.cached_property
    def cos_thetas(self) -> np.ndarray:
        return _readonly(np.cos(self.thetas))

    @functools.cached_property
    def chis(self) -> np.ndarray:
        """Conformal latitude of every node, chi = log(tan(theta/2))."""
        return _readonly(mercator_of_colatitude(self.thetas))

    def band_mask(self, lo: float, hi: float) -> np.ndarray:
        """Boolean mask selecting colatitude rows with lo <= theta <= hi."""
        return (self.thetas >= lo) & (self.thetas <= hi)


@dataclasses.dataclass(frozen=True)
class ScalarField:
    """Samples of a scalar on a :class:`Grid`, stored theta-major."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.shape != (self.grid.nlat, self.grid.nlon):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"{(self.grid.nlat, self.grid.nlon)}"
            )


def cell_weights(thetas: np.ndarray) -> np.ndarray:
    """Exact sin(theta) cell masses for arbitrary interior colatitudes.

    Cell edges are placed halfway between neighbouring nodes, with the first
    and last edges at the poles, so the weights telescope to exactly 2.
    """
    t = np.asarray(thetas, dtype=np.float64)
    edges = np.concatenate(([0.0], 0.5 * (t[1:] + t[:-1]), [np.pi]))
    return np.cos(edges[:-1]) - np.cos(edges[1:])


def build_grid(spec: GridSpec) -> Grid:
    """Build the quadrature grid described by ``spec``.

    Gauss-Legendre colatitudes are the roots of the Legendre polynomial in
    mu = cos(theta); their weights integrate polynomials in mu up to degree
    2*nlat - 1 exactly.  The uniform kind places nodes at cell midpoints
    (i + 1/2) * pi/nlat with exact cell masses as weights.
    """
    if spec.kind == GAUSS_LEGENDRE:
        mu, w = roots_legendre(spec.nlat)
        thetas = np.arccos(mu)[::-1].copy()
        weights = w[::-1].copy()
    else:
        h = np.pi / spec.nlat
        thetas = (np.arange(spec.nlat) + 0.5) * h
        weights = cell_weights(thetas)
    phis = 2.0 * np.pi * np.arange(spec.nlon) / spec.nlon
    return Grid(thetas=thetas, phis=phis, weights=weights)


def grid_from_colatitudes(thetas: np.ndarray, nlon: int) -> Grid:
    """Grid over caller-supplied interior colatitudes, with cell-mass weights."""
    thetas = np.asarray(thetas, dtype=np.float64)
    phis = 2.0 * np.pi * np.arange(nlon) / nlon
    return Grid(thetas=thetas, phis=phis, weights=cell_weights(thetas))


def surface_integral(f: ScalarField) -> float:
    """Integral of ``f`` over the whole sphere with the area element dA."""
    row_sums = f.values.sum(axis=1)
    return float(f.grid.weights @ row_sums) * f.grid.dphi


def mercator_of_colatitude(theta):
    """Conformal latitude chi = log(tan(theta/2)).

    Strictly increasing on (0, pi), zero at the equator and divergent at the
    poles; raises for arguments outside the open interval.
    """
    t = np.asarray(theta, dtype=np.float64)
    if np.any(t <= 0.0) or np.any(t >= np.pi):
        raise ValueError("conformal latitude diverges at the poles; need 0 < theta < pi")
    chi = np.log(np.tan(0.5 * t))
    return float(chi) if t.ndim == 0 else chi


def colatitude_of_mercator(chi):
    """Inverse of :func:`mercator_of_colatitude`: theta = 2*atan(exp(chi))."""
    c = np.asarray(chi, dtype=np.float64)
    theta = 2.0 * np.arctan(np.exp(c))
    return float(theta) if c.ndim == 0 else theta


def write_scalar_field(f: ScalarField, path) -> None:
    """Write a field as CSV with header theta,phi,value in theta-major order."""
    lines = ["theta,phi,value"]
    for i, theta in enumerate(f.grid.thetas):
        for j, phi in enumerate(f.grid.phis):
            lines.append(f"{theta:.17g},{phi:.17g},{f.values[i, j]:.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_scalar_field(path):
    """Read a theta,phi,value CSV back into (thetas, phis, values) arrays."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "theta,phi,value":
            raise ValueError(f"unexpected header {header!r} in {path}")
        rows = [line.split(",") for line in fh.read().split()]
    data = np.array(rows, dtype=np.float64)
    thetas = np.unique(data[:, 0])
    phis = np.unique(data[:, 1])
    values = data[:, 2].reshape(thetas.size, phis.size)
    return thetas, phis, values
