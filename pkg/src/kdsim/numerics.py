"""Numerical substrate: Bessel functions, 2-D quadrature, an SVD-based
Schmidt-number estimator, and Gaussian peak fitting.

These routines are the reference oracles the physics modules are validated
against, so they are kept self-contained: the Bessel evaluation uses its own
Miller recurrence rather than an external special-function library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import least_squares

from .errors import ConvergenceError, DomainError, NumericsError

MAX_BESSEL_ORDER = 200
MAX_BESSEL_ARGUMENT = 50.0

# Extra start orders for the downward recurrence.  Above k = z the ratio
# J_k/J_{k-1} <= 1/2, so 80 spare orders suppress the seed error below 1e-24.
_MILLER_PAD = 80
_RESCALE_LIMIT = 1e250
_SERIES_CUTOFF = 0.5


def _bessel_series(n: int, z: float) -> float:
    # Ascending series; safe for small z where the leading term dominates.
    half = 0.5 * z
    try:
        term = half**n / math.factorial(n)
    except OverflowError:
        term = 0.0
    if term == 0.0 and n > 0:
        return 0.0
    total = term
    z2 = -(half * half)
    for k in range(1, 40):
        term *= z2 / (k * (n + k))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def _bessel_miller(n_max: int, z: float) -> np.ndarray:
    # Downward Miller recurrence, normalized with J_0 + 2*sum J_{2k} = 1.
    start = max(n_max, int(z)) + _MILLER_PAD
    if start % 2:
        start += 1
    out = np.zeros(n_max + 1)
    jp = 0.0  # J_{k+1}
    jc = 1e-30  # J_k, arbitrary seed
    even_sum = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / z) * jc - jp
        jp, jc = jc, jm
        order = k - 1
        if order <= n_max:
            out[order] = jc
        if order > 0 and order % 2 == 0:
            even_sum += jc
        if abs(jc) > _RESCALE_LIMIT:
            jp *= 1e-250
            jc *= 1e-250
            even_sum *= 1e-250
            out *= 1e-250
    norm = jc + 2.0 * even_sum
    return out / norm


def bessel_j_all(n_max: int, z: float) -> np.ndarray:
    """J_0(z) .. J_{n_max}(z) in one pass.

    Negative ``z`` is folded back with J_n(-z) = (-1)^n J_n(z).
    """
    if not 0 <= n_max <= MAX_BESSEL_ORDER:
        raise DomainError(f"Bessel order {n_max} outside supported range 0..{MAX_BESSEL_ORDER}")
    if not math.isfinite(z) or abs(z) > MAX_BESSEL_ARGUMENT:
        raise DomainError(f"Bessel argument {z!r} outside supported range |z| <= {MAX_BESSEL_ARGUMENT}")
    az = abs(z)
    if az == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if az < _SERIES_CUTOFF:
        out = np.array([_bessel_series(n, az) for n in range(n_max + 1)])
    else:
        out = _bessel_miller(n_max, az)
    if z < 0.0:
        out[1::2] *= -1.0
    return out


def bessel_jn(n: int, z: float) -> float:
    """Cylindrical Bessel function J_n(z) for integer n, |n| <= 200, |z| <= 50."""
    n = int(n)
    if abs(n) > MAX_BESSEL_ORDER:
        raise DomainError(f"Bessel order {n} outside supported range |n| <= {MAX_BESSEL_ORDER}")
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -1.0
    return sign * float(bessel_j_all(n, z)[n])


class QuadScheme(Enum):
    TENSOR_GAUSS = "tensor-gauss"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over the square [-box_halfwidth, box_halfwidth]^2.

    ``tol`` is the absolute target used by the adaptive scheme only.
    """

    scheme: QuadScheme = QuadScheme.TENSOR_GAUSS
    order: int = 96
    box_halfwidth: float = 8.0
    tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.order < 2:
            raise DomainError("quadrature order must be >= 2")
        if not (math.isfinite(self.box_halfwidth) and self.box_halfwidth > 0):
            raise DomainError("box_halfwidth must be positive and finite")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise DomainError("tol must be positive and finite")


_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _leggauss_cache:
        _leggauss_cache[order] = leggauss(order)
    return _leggauss_cache[order]


def _eval_grid(f, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    X, Y = np.meshgrid(x, y, indexing="ij")
    try:
        vals = np.asarray(f(X, Y), dtype=float)
        if vals.shape != X.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.vectorize(f)(X, Y).astype(float)
    if not np.all(np.isfinite(vals)):
        i, j = np.unravel_index(int(np.argmin(np.isfinite(vals))), vals.shape)
        raise NumericsError(f"integrand is not finite at ({X[i, j]!r}, {Y[i, j]!r})")
    return vals


def _tensor_panel(f, x0: float, x1: float, y0: float, y1: float, order: int) -> float:
    nodes, weights = _nodes(order)
    cx, hx = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    cy, hy = 0.5 * (y0 + y1), 0.5 * (y1 - y0)
    vals = _eval_grid(f, cx + hx * nodes, cy + hy * nodes)
    return float(hx * hy * np.einsum("i,j,ij->", weights, weights, vals))


def quad2d(f, spec: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """Integrate ``f(p, q)`` over the spec's box.

    Returns ``(value, error_estimate)``.  ``f`` may be vectorized over numpy
    arrays or accept plain scalars.  The estimate compares against a run at
    half the order (tensor scheme) or sums per-panel estimates (adaptive).
    """
    L = spec.box_halfwidth
    if spec.scheme is QuadScheme.TENSOR_GAUSS:
        hi = _tensor_panel(f, -L, L, -L, L, spec.order)
        lo = _tensor_panel(f, -L, L, -L, L, max(2, spec.order // 2))
        err = max(abs(hi - lo), 1e-13 * (1.0 + abs(hi)))
        return hi, err
    return _adaptive(f, spec)


def _adaptive(f, spec: QuadratureSpec) -> tuple[float, float]:
    L = spec.box_halfwidth
    order = min(spec.order, 24)
    area_total = (2 * L) ** 2
    total = 0.0
    err_total = 0.0
    stack = [(-L, L, -L, L, 0)]
    while stack:
        x0, x1, y0, y1, depth = stack.pop()
        hi = _tensor_panel(f, x0, x1, y0, y1, order)
        lo = _tensor_panel(f, x0, x1, y0, y1, max(2, order // 2))
        est = abs(hi - lo)
        budget = spec.tol * (x1 - x0) * (y1 - y0) / area_total
        if est <= budget or depth >= 14:
            total += hi
            err_total += max(est, 1e-15 * abs(hi))
            continue
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        stack.extend(
            [
                (x0, xm, y0, ym, depth + 1),
                (xm, x1, y0, ym, depth + 1),
                (x0, xm, ym, y1, depth + 1),
                (xm, x1, ym, y1, depth + 1),
            ]
        )
    return total, max(err_total, 1e-13 * (1.0 + abs(total)))


def schmidt_via_svd(kernel_samples: np.ndarray, grid_weight: float) -> float:
    """Schmidt number of a sampled two-variable kernel.

    ``kernel_samples[i, j]`` holds the kernel on a p x q grid with uniform
    cell weight ``grid_weight``; the Schmidt coefficients are the squared
    singular values of the weighted sample matrix.  The caller must supply a
    grid wide and fine enough to resolve the kernel.
    """
    arr = np.asarray(kernel_samples, dtype=float)
    if arr.ndim != 2:
        raise DomainError("kernel_samples must be a 2-D array")
    if not np.all(np.isfinite(arr)):
        raise NumericsError("kernel_samples contain non-finite values")
    if not (math.isfinite(grid_weight) and grid_weight > 0):
        raise DomainError("grid_weight must be positive")
    if not np.any(arr):
        raise DomainError("kernel is identically zero")
    singular = np.linalg.svd(arr * grid_weight, compute_uv=False)
    lam = singular * singular
    return float(lam.sum() ** 2 / np.dot(lam, lam))


@dataclass(frozen=True)
class GaussianFitResult:
    """Least-squares fit of ``sigma * exp(-(q - center)^2 / q_eff_sq)``."""

    sigma_eff: float
    q_eff_sq: float
    r_squared: float
    center: float = 0.0


def fit_gaussian(samples, free_center: bool = False) -> GaussianFitResult:
    """Fit a single Gaussian to ``(coordinate, value)`` samples.

    Levenberg-Marquardt on (sigma, q_eff_sq) with an analytic Jacobian,
    initialized from the peak value and the weighted second moment.  The
    center is pinned at 0 unless ``free_center`` is set.

    Raises DomainError for fewer than 8 samples, negative values, or
    all-zero data, and ConvergenceError if the optimizer fails.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be pairs of (coordinate, value)")
    if arr.shape[0] < 8:
        raise DomainError("need at least 8 samples for the Gaussian fit")
    coords, values = arr[:, 0], arr[:, 1]
    if not np.all(np.isfinite(arr)):
        raise NumericsError("samples contain non-finite values")
    if np.any(values < 0):
        raise DomainError("sample values must be non-negative")
    if not np.any(values > 0):
        raise DomainError("all sample values are zero")

    mass = values.sum()
    c0 = float(np.dot(values, coords) / mass) if free_center else 0.0
    w0 = 2.0 * float(np.dot(values, (coords - c0) ** 2) / mass)
    span = float(coords.max() - coords.min())
    w0 = max(w0, 1e-6 * span * span, 1e-12)
    s0 = float(values.max())

    if free_center:

        def resid(t):
            return t[0] * np.exp(-((coords - t[2]) ** 2) / t[1]) - values

        def jac(t):
            d = coords - t[2]
            e = np.exp(-(d * d) / t[1])
            return np.stack([e, t[0] * e * d * d / (t[1] * t[1]), 2.0 * t[0] * e * d / t[1]], axis=1)

        x0 = [s0, w0, c0]
    else:

        def resid(t):
            return t[0] * np.exp(-(coords * coords) / t[1]) - values

        def jac(t):
            e = np.exp(-(coords * coords) / t[1])
            return np.stack([e, t[0] * e * coords * coords / (t[1] * t[1])], axis=1)

        x0 = [s0, w0]

    res = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    if res.status <= 0:
        raise ConvergenceError(
            f"Gaussian fit did not converge: status={res.status}, nfev={res.nfev}, cost={res.cost:.3e}"
        )
    sigma, width = float(res.x[0]), float(res.x[1])
    center = float(res.x[2]) if free_center else 0.0
    if sigma < 0 or width <= 0 or not (math.isfinite(sigma) and math.isfinite(width)):
        raise ConvergenceError(
            f"Gaussian fit converged to an invalid model: sigma={sigma!r}, q_eff_sq={width!r}"
        )
    ss_res = float(np.sum(res.fun**2))
    ss_tot = float(np.sum((values - values.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return GaussianFitResult(sigma_eff=sigma, q_eff_sq=width, r_squared=r2, center=center)
