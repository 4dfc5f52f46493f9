import math

import numpy as np
import pytest

from sphereflow import grid as sgrid


def fit_order(errors, refinement=2.0):
    """Least-squares convergence order from errors at successively refined grids."""
    e = np.asarray(errors, dtype=float)
    steps = np.arange(e.size)
    slope = np.polyfit(steps, np.log(e), 1)[0]
    return -slope / math.log(refinement)


def band_max(field, lo=sgrid.DEFAULT_BAND[0], hi=sgrid.DEFAULT_BAND[1]):
    mask = field.grid.band_mask(lo, hi)
    return float(np.max(np.abs(field.values[mask, :])))


def zonal_field(grid, profile):
    return sgrid.ScalarField(grid, np.repeat(np.asarray(profile)[:, None], grid.nlon, axis=1))


@pytest.fixture
def gl_grid():
    return sgrid.build_grid(sgrid.GridSpec(nlat=48, nlon=96))


@pytest.fixture
def uniform_grid():
    return sgrid.build_grid(sgrid.GridSpec(nlat=64, nlon=128, kind="uniform-interior"))
