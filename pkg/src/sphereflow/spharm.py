"""Spherical-harmonic analysis and synthesis, and the spectral Laplacian.

The basis is orthonormal over the sphere with the Condon-Shortley phase:

    Y_l^m(theta, phi) = Pbar_l^m(cos theta) * exp(i m phi),
    int |Y_l^m|^2 dA = 1,    Y_l^{-m} = (-1)^m conj(Y_l^m).

Coefficients of a real field therefore satisfy
a_{l,-m} = (-1)^m conj(a_{l,m}).  The Laplace-Beltrami operator is diagonal
with eigenvalues -l(l+1), which makes the Poisson inversion of the
vorticity-streamfunction relation a coefficient division.

Normalized associated Legendre functions are generated with the standard
forward-stable three-term recurrences; longitude transforms go through the
FFT by default, with a direct discrete sum available as a cross-check
(``longitude_transform="direct"``).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .grid import Grid, ScalarField

#: Relative bound on the mean vorticity accepted by :func:`invert_poisson`.
GAUSS_CONSTRAINT_RTOL = 1e-10


class GaussConstraintError(ValueError):
    """Raised when a field that must have zero mean vorticity does not."""


class SymmetryError(ValueError):
    """Raised when coefficients expected to describe a real field do not."""


@dataclasses.dataclass(frozen=True)
class SpectralField:
    """Spherical-harmonic coefficients a_{l,m} for 0 <= l <= lmax, |m| <= l.

    ``coeffs`` has shape (lmax+1, 2*lmax+1); column lmax + m holds order m.
    Entries with |m| > l must be zero.
    """

    lmax: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.lmax < 0 or c.shape != (self.lmax + 1, 2 * self.lmax + 1):
            raise ValueError(
                f"coefficient array shape {c.shape} does not match lmax={self.lmax}"
            )
        ls = np.arange(self.lmax + 1)[:, None]
        ms = np.arange(-self.lmax, self.lmax + 1)[None, :]
        bad = np.abs(c[np.abs(ms) > ls])
        if bad.size and float(bad.max()) != 0.0:
            raise ValueError("coefficients with |m| > l must be zero")


def zeros(lmax: int) -> SpectralField:
    return SpectralField(lmax, np.zeros((lmax + 1, 2 * lmax + 1), dtype=np.complex128))


def coeff(c: SpectralField, l: int, m: int) -> complex:
    """Single coefficient a_{l,m}."""
    if not (0 <= l <= c.lmax and abs(m) <= l):
        raise ValueError(f"(l={l}, m={m}) outside the truncation")
    return complex(c.coeffs[l, c.lmax + m])


def with_coeff(c: SpectralField, l: int, m: int, value: complex) -> SpectralField:
    """Copy of ``c`` with a_{l,m} replaced."""
    if not (0 <= l <= c.lmax and abs(m) <= l):
        raise ValueError(f"(l={l}, m={m}) outside the truncation")
    arr = np.array(c.coeffs)
    arr[l, c.lmax + m] = value
    return SpectralField(c.lmax, arr)


def real_single_mode(lmax: int, l: int, m: int, amplitude: float = 1.0) -> SpectralField:
    """Real field concentrated in degree l, |order| m, with unit L2 norm per unit amplitude."""
    arr = np.zeros((lmax + 1, 2 * lmax + 1), dtype=np.complex128)
    if not (0 <= l <= lmax and abs(m) <= l):
        raise ValueError(f"(l={l}, m={m}) outside the truncation")
    if m == 0:
        arr[l, lmax] = amplitude
    else:
        m = abs(m)
        arr[l, lmax + m] = amplitude / math.sqrt(2.0)
        arr[l, lmax - m] = (-1) ** m * amplitude / math.sqrt(2.0)
    return SpectralField(lmax, arr)


def random_real_field(lmax: int, rng: np.random.Generator, zero_mean: bool = True) -> SpectralField:
    """Random coefficients with the conjugate symmetry of a real field."""
    arr = np.zeros((lmax + 1, 2 * lmax + 1), dtype=np.complex128)
    for l in range(lmax + 1):
        arr[l, lmax] = rng.standard_normal()
        for m in range(1, l + 1):
            z = rng.standard_normal() + 1j * rng.standard_normal()
            arr[l, lmax + m] = z
            arr[l, lmax - m] = (-1) ** m * np.conj(z)
    if zero_mean:
        arr[0, lmax] = 0.0
    return SpectralField(lmax, arr)


def l2_norm(c: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(c.coeffs) ** 2)))


def is_conjugate_symmetric(c: SpectralField, tol: float = 1e-12) -> bool:
    """Check a_{l,-m} == (-1)^m conj(a_{l,m}) to within ``tol`` (absolute)."""
    L = c.lmax
    signs = (-1.0) ** np.arange(1, L + 1)
    neg = c.coeffs[:, L - 1 :: -1][:, : L]
    pos = c.coeffs[:, L + 1 :]
    return bool(np.max(np.abs(neg - signs[None, :] * np.conj(pos)), initial=0.0) <= tol)


def _legendre_tables(thetas: np.ndarray, lmax: int) -> np.ndarray:
    """Orthonormal Pbar_l^m(cos theta), shape (nlat, lmax+1, lmax+1), m >= 0."""
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    p = np.zeros((thetas.size, lmax + 1, lmax + 1))
    pmm = np.full(thetas.size, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(lmax + 1):
        if m > 0:
            pmm = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t * pmm
        p[:, m, m] = pmm
        if m + 1 <= lmax:
            p[:, m + 1, m] = math.sqrt(2.0 * m + 3.0) * cos_t * pmm
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[:, l, m] = a * (cos_t * p[:, l - 1, m] - b * p[:, l - 2, m])
    return p


def _legendre_dtheta_tables(thetas: np.ndarray, lmax: int, plm: np.ndarray) -> np.ndarray:
    """d Pbar_l^m / d theta via the degree-lowering relation."""
    cos_t = np.cos(thetas)[:, None, None]
    inv_sin = 1.0 / np.sin(thetas)[:, None, None]
    ls = np.arange(lmax + 1, dtype=np.float64)[None, :, None]
    dp = ls * cos_t * plm
    for l in range(1, lmax + 1):
        for m in range(0, l):
            c = math.sqrt((l * l - m * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0))
            dp[:, l, m] -= c * plm[:, l - 1, m]
    return dp * inv_sin


@dataclasses.dataclass(frozen=True)
class TransformPlan:
    """Immutable Legendre tables bound to one grid and degree bound."""

    grid: Grid
    lmax: int
    plm: np.ndarray
    dplm: np.ndarray

    def __post_init__(self):
        for name in ("plm", "dplm"):
            a = np.ascontiguousarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def build_plan(grid: Grid, lmax: int) -> TransformPlan:
    """Precompute Legendre tables; the grid must resolve degree lmax.

    Requires nlat >= lmax + 1 and nlon >= 2*lmax + 1 so that analysis of a
    band-limited field is exact on Gauss-Legendre grids.
    """
    if lmax < 0:
        raise ValueError("lmax must be nonnegative")
    if grid.nlat < lmax + 1 or grid.nlon < 2 * lmax + 1:
        raise ValueError(
            f"grid {grid.nlat} x {grid.nlon} cannot resolve lmax={lmax}; "
            f"need nlat >= {lmax + 1} and nlon >= {2 * lmax + 1}"
        )
    plm = _legendre_tables(grid.thetas, lmax)
    dplm = _legendre_dtheta_tables(grid.thetas, lmax, plm)
    return TransformPlan(grid=grid, lmax=lmax, plm=plm, dplm=dplm)


def _require_plan_grid(f: ScalarField, plan: TransformPlan) -> None:
    if f.grid is plan.grid:
        return
    if not (
        np.array_equal(f.grid.thetas, plan.grid.thetas)
        and np.array_equal(f.grid.phis, plan.grid.phis)
    ):
        raise ValueError("field grid does not match the transform plan")


def _longitude_spectrum(values: np.ndarray, dphi: float, transform: str) -> np.ndarray:
    """F[i, k] = dphi * sum_j f[i, j] exp(-i k phi_j), FFT bin layout."""
    if transform == "fft":
        return np.fft.fft(values, axis=1) * dphi
    if transform == "direct":
        nlon = values.shape[1]
        phis = 2.0 * np.pi * np.arange(nlon) / nlon
        kernel = np.exp(-1j * np.outer(phis, np.arange(nlon)))
        return values @ kernel * dphi
    raise ValueError(f"unknown longitude transform {transform!r}")


def analyze(f: ScalarField, plan: TransformPlan, longitude_transform: str = "fft") -> SpectralField:
    """Project a field onto the orthonormal basis by quadrature.

    a_{l,m} = sum_i w_i dphi sum_j f(theta_i, phi_j) conj(Y_l^m); exact for
    band-limited fields on Gauss-Legendre grids resolving the truncation.
    """
    _require_plan_grid(f, plan)
    g, L = plan.grid, plan.lmax
    F = _longitude_spectrum(f.values, g.dphi, longitude_transform)
    w = g.weights
    a_pos = np.einsum("i,ilm,im->lm", w, plan.plm, F[:, : L + 1])
    arr = np.zeros((L + 1, 2 * L + 1), dtype=np.complex128)
    arr[:, L:] = a_pos
    if L > 0:
        # conj(Y_l^{-m}) = (-1)^m Pbar_l^m exp(+i m phi) picks the bin nlon - m
        F_neg = F[:, -1 : -(L + 1) : -1]
        signs = (-1.0) ** np.arange(1, L + 1)
        a_neg = np.einsum("i,ilm,im->lm", w, plan.plm[:, :, 1:], F_neg) * signs[None, :]
        arr[:, :L] = a_neg[:, ::-1]
    return SpectralField(L, arr)


def _synthesize_m_profiles(c: SpectralField, plan: TransformPlan, tables: np.ndarray):
    """Latitude profiles G_m(theta_i) for m = 0..L and their negative-m twins."""
    L = c.lmax
    sub = tables[:, : L + 1, : L + 1]
    g_pos = np.einsum("ilm,lm->im", sub, c.coeffs[:, L:])
    if L == 0:
        return g_pos, np.zeros((tables.shape[0], 0), dtype=np.complex128)
    signs = (-1.0) ** np.arange(1, L + 1)
    a_neg = c.coeffs[:, :L][:, ::-1]
    g_neg = np.einsum("ilm,lm->im", sub[:, :, 1:], a_neg) * signs[None, :]
    return g_pos, g_neg


def _longitude_synthesis(g_pos, g_neg, nlon: int, transform: str) -> np.ndarray:
    spectrum = np.zeros((g_pos.shape[0], nlon), dtype=np.complex128)
    L = g_pos.shape[1] - 1
    spectrum[:, : L + 1] = g_pos
    if g_neg.shape[1]:
        spectrum[:, -1 : -(L + 1) : -1] = g_neg
    if transform == "fft":
        return np.fft.ifft(spectrum, axis=1) * nlon
    if transform == "direct":
        phis = 2.0 * np.pi * np.arange(nlon) / nlon
        kernel = np.exp(1j * np.outer(np.arange(nlon), phis))
        return spectrum @ kernel
    raise ValueError(f"unknown longitude transform {transform!r}")


def synthesize_complex(
    c: SpectralField, plan: TransformPlan, longitude_transform: str = "fft"
) -> np.ndarray:
    """Pointwise sum a_{l,m} Y_l^m on the plan's grid, kept complex."""
    if c.lmax > plan.lmax:
        raise ValueError(f"plan resolves lmax={plan.lmax} < field lmax={c.lmax}")
    g_pos, g_neg = _synthesize_m_profiles(c, plan, plan.plm)
    return _longitude_synthesis(g_pos, g_neg, plan.grid.nlon, longitude_transform)


def synthesize(
    c: SpectralField, plan: TransformPlan, longitude_transform: str = "fft"
) -> ScalarField:
    """Evaluate sum a_{l,m} Y_l^m on the plan's grid as a real field.

    The imaginary residue must stay below 1e-10 * max(1, |field|); a larger
    residue indicates broken conjugate symmetry and raises
    :class:`SymmetryError`.
    """
    values = synthesize_complex(c, plan, longitude_transform)
    residue = float(np.max(np.abs(values.imag), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(values.real), initial=0.0)))
    if residue > 1e-10 * scale:
        raise SymmetryError(
            f"imaginary residue {residue:.3e} exceeds tolerance; "
            "coefficients do not describe a real field"
        )
    return ScalarField(plan.grid, values.real)


def synthesize_gradient(c: SpectralField, plan: TransformPlan):
    """Pointwise (df/dtheta, df/dphi) of the truncated expansion, as real arrays."""
    if c.lmax > plan.lmax:
        raise ValueError(f"plan resolves lmax={plan.lmax} < field lmax={c.lmax}")
    g_pos, g_neg = _synthesize_m_profiles(c, plan, plan.dplm)
    d_theta = _longitude_synthesis(g_pos, g_neg, plan.grid.nlon, "fft").real
    L = c.lmax
    ms = np.arange(-L, L + 1, dtype=np.float64)[None, :]
    c_phi = SpectralField(L, c.coeffs * (1j * ms))
    g_pos, g_neg = _synthesize_m_profiles(c_phi, plan, plan.plm)
    d_phi = _longitude_synthesis(g_pos, g_neg, plan.grid.nlon, "fft").real
    return d_theta, d_phi


def _eigenvalues(lmax: int) -> np.ndarray:
    ls = np.arange(lmax + 1, dtype=np.float64)[:, None]
    return -ls * (ls + 1.0)


def laplace_beltrami_spectral(c: SpectralField) -> SpectralField:
    """Coefficient-wise a_{l,m} -> -l(l+1) a_{l,m}."""
    return SpectralField(c.lmax, c.coeffs * _eigenvalues(c.lmax))


def invert_poisson(omega: SpectralField) -> SpectralField:
    """Solve -lap(psi) = omega in coefficients, zero-mean gauge.

    The l = 0 mode is not invertible; the mean vorticity must vanish to
    within ``GAUSS_CONSTRAINT_RTOL`` times the coefficient norm.
    """
    L = omega.lmax
    mean = abs(complex(omega.coeffs[0, L]))
    if mean > GAUSS_CONSTRAINT_RTOL * max(l2_norm(omega), np.finfo(float).tiny):
        raise GaussConstraintError(
            f"mean vorticity {mean:.3e} violates the zero-total-vorticity constraint"
        )
    eig = _eigenvalues(L)
    eig[0, 0] = -1.0  # placeholder, the l = 0 row is zeroed below
    psi = omega.coeffs / (-eig)
    psi[0, :] = 0.0
    return SpectralField(L, psi)


def write_spectral_field(c: SpectralField, path) -> None:
    """CSV serialization with header l,m,re,im, one row per retained (l, m)."""
    lines = ["l,m,re,im"]
    for l in range(c.lmax + 1):
        for m in range(-l, l + 1):
            z = c.coeffs[l, c.lmax + m]
            lines.append(f"{l},{m},{z.real:.17g},{z.imag:.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spectral_field(path) -> SpectralField:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "l,m,re,im":
            raise ValueError(f"unexpected header {header!r} in {path}")
        rows = [line.split(",") for line in fh.read().split()]
    if not rows:
        raise ValueError(f"no coefficients in {path}")
    ls = np.array([int(r[0]) for r in rows])
    lmax = int(ls.max())
    arr = np.zeros((lmax + 1, 2 * lmax + 1), dtype=np.complex128)
    for r in rows:
        l, m = int(r[0]), int(r[1])
        arr[l, lmax + m] = float(r[2]) + 1j * float(r[3])
    return SpectralField(lmax, arr)
