"""Gaussian momentum-entangled pairs diffracted by two gratings.

The initial amplitude is ``exp(-p^2/Q^2 - q^2/Q*^2 - p q / P^2)``; the
coupling spread P controls the entanglement (P = inf is the product state).
Diffraction turns it into a lattice of shifted copies weighted by the
grating amplitudes, and every norm-type integral reduces to closed-form 2-D
Gaussian integrals over the shift lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericsError
from .grating import GratingConfig, amplitude_arrays
from .grids import Axis, PatternGrid, UNNORMALIZED_SLICE
from .numerics import QuadratureSpec, quad2d


@dataclass(frozen=True)
class GaussianEntangledState:
    """Spreads (Q, Q*, P) of the initial two-particle Gaussian.

    ``p_coupling = inf`` encodes the separable state; all formulas treat it
    through 1/P^2 = 0 instead of a large sentinel.  States require
    4 P^4 > Q^2 Q*^2 to be normalizable, which is also the validity domain
    of the closed-form Schmidt number and normalization.
    """

    q_spread: float
    q_star_spread: float
    p_coupling: float = math.inf

    def __post_init__(self) -> None:
        for name in ("q_spread", "q_star_spread"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name}={v!r} must be positive and finite")
        if not self.p_coupling > 0:
            raise DomainError(f"p_coupling={self.p_coupling!r} must be positive")

    @property
    def inv_p_sq(self) -> float:
        return 0.0 if math.isinf(self.p_coupling) else self.p_coupling**-2

    @property
    def is_entangled(self) -> bool:
        return not math.isinf(self.p_coupling)

    @property
    def coupling_margin(self) -> float:
        """4/(Q^2 Q*^2) - 1/P^4; positive iff the state is normalizable."""
        qq = self.q_spread * self.q_star_spread
        return 4.0 / (qq * qq) - self.inv_p_sq**2


def _require_normalizable(state: GaussianEntangledState) -> None:
    if state.coupling_margin <= 0:
        raise DomainError(
            "state outside the analytic regime: 4 P^4 <= Q^2 Q*^2 (not normalizable)"
        )


def initial_amplitude(state: GaussianEntangledState, p, q):
    """Unnormalized initial amplitude at momenta (p, q); accepts arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.exp(
        -(p * p) / state.q_spread**2
        - (q * q) / state.q_star_spread**2
        - p * q * state.inv_p_sq
    )
    return float(out) if out.ndim == 0 else out


def schmidt_number(state: GaussianEntangledState) -> float:
    """Closed-form Schmidt number (1 - Q^2 Q*^2 / 4 P^4)^(-1/2); 1 iff product."""
    _require_normalizable(state)
    qq = state.q_spread * state.q_star_spread
    return (1.0 - (qq * qq) * state.inv_p_sq**2 / 4.0) ** -0.5


def diffracted_amplitude(state: GaussianEntangledState, left: GratingConfig, right: GratingConfig, p, q):
    """Truncated double sum of shifted initial amplitudes, weighted by b_n b_m."""
    ns, b_l = amplitude_arrays(left)
    ms, b_r = amplitude_arrays(right)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    acc = np.zeros(np.broadcast(p, q).shape, dtype=complex)
    for n, bn in zip(ns, b_l):
        p_shift = p - 2.0 * n * left.k
        for m, bm in zip(ms, b_r):
            acc = acc + (bn * bm) * initial_amplitude(state, p_shift, q - 2.0 * m * right.k)
    if acc.ndim == 0:
        return complex(acc)
    return acc


@dataclass(frozen=True)
class NormalizationTerm:
    """Linear exponents of one (n, m, r, s) cell of the norm lattice sum."""

    n: int
    m: int
    r: int
    s: int
    alpha: float
    beta: float


def normalization_term(
    state: GaussianEntangledState,
    left: GratingConfig,
    right: GratingConfig,
    n: int,
    m: int,
    r: int,
    s: int,
) -> NormalizationTerm:
    """Per-term exponents: alpha = 4 K_L (n+r)/Q^2 + 2 K_R (m+s)/P^2 and
    beta = 4 K_R (m+s)/Q*^2 + 2 K_L (n+r)/P^2 (hbar = 1)."""
    ip2 = state.inv_p_sq
    alpha = 4.0 * left.k * (n + r) / state.q_spread**2 + 2.0 * right.k * (m + s) * ip2
    beta = 4.0 * right.k * (m + s) / state.q_star_spread**2 + 2.0 * left.k * (n + r) * ip2
    return NormalizationTerm(n=n, m=m, r=r, s=s, alpha=alpha, beta=beta)


def lattice_overlap_integral(
    state: GaussianEntangledState,
    left: GratingConfig,
    right: GratingConfig,
    n: int,
    m: int,
    r: int,
    s: int,
) -> float:
    """Exact overlap integral of two lattice-shifted copies of the state,

        integral of Phi0(p - 2nK_L, q - 2mK_R) Phi0(p - 2rK_L, q - 2sK_R),

    one scalar cell of the quadruple normalization sum."""
    _require_normalizable(state)
    q2 = state.q_spread**2
    qs2 = state.q_star_spread**2
    ip2 = state.inv_p_sq
    kl, kr = left.k, right.k
    det4 = state.coupling_margin
    term = normalization_term(state, left, right, n, m, r, s)
    expo = (
        -4.0 * (n * n + r * r) * kl * kl / q2
        - 4.0 * (m * m + s * s) * kr * kr / qs2
        - 4.0 * (n * m + r * s) * kl * kr * ip2
        + (term.alpha**2 / qs2 + term.beta**2 / q2 - term.alpha * term.beta * ip2)
        / (2.0 * det4)
    )
    return math.pi / math.sqrt(det4) * math.exp(expo)


def norm_integral_analytic(
    state: GaussianEntangledState, left: GratingConfig, right: GratingConfig
) -> float:
    """Integral of |diffracted amplitude|^2 over the full momentum plane.

    Quadruple lattice sum over (n, m, r, s): each term carries the
    closed-form Gaussian-overlap integral

        pi / sqrt(d) * exp(-4(n^2+r^2)K_L^2/Q^2 - 4(m^2+s^2)K_R^2/Q*^2
                           - 4(nm+rs)K_L K_R/P^2)
                     * exp((alpha^2/Q*^2 + beta^2/Q^2 - alpha beta/P^2)/(2 d))

    with d = 4/(Q^2 Q*^2) - 1/P^4, alpha = 4 K_L (n+r)/Q^2 + 2 K_R (m+s)/P^2
    and beta = 4 K_R (m+s)/Q*^2 + 2 K_L (n+r)/P^2.  The two exponents are
    combined before exponentiation: each term is bounded by the bare-state
    norm (Cauchy-Schwarz), while its factors separately overflow for large
    cutoffs.  The value is independent of the pulse areas up to the
    truncation tail, since the gratings only imprint phases.
    """
    _require_normalizable(state)
    q2 = state.q_spread**2
    qs2 = state.q_star_spread**2
    ip2 = state.inv_p_sq
    kl, kr = left.k, right.k
    det4 = state.coupling_margin

    ns, b_l = amplitude_arrays(left)
    ms, b_r = amplitude_arrays(right)
    n = ns[:, None, None].astype(float)
    m = ms[None, :, None].astype(float)
    r = ns[None, None, :].astype(float)
    coeff = np.conj(b_l)[:, None, None] * np.conj(b_r)[None, :, None] * b_l[None, None, :]
    total = 0.0 + 0.0j
    for s_idx, s in enumerate(ms):
        s = float(s)
        alpha = 4.0 * kl * (n + r) / q2 + 2.0 * kr * (m + s) * ip2
        beta = 4.0 * kr * (m + s) / qs2 + 2.0 * kl * (n + r) * ip2
        expo = (
            -4.0 * (n * n + r * r) * kl * kl / q2
            - 4.0 * (m * m + s * s) * kr * kr / qs2
            - 4.0 * (n * m + r * s) * kl * kr * ip2
            + (alpha * alpha / qs2 + beta * beta / q2 - alpha * beta * ip2) / (2.0 * det4)
        )
        total += b_r[s_idx] * np.sum(coeff * np.exp(expo))
    total *= np.pi / math.sqrt(det4)
    if not math.isfinite(total.real) or total.real <= 0:
        raise NumericsError(f"normalization sum evaluated to {total!r}")
    return float(total.real)


def normalization_factor(
    state: GaussianEntangledState, left: GratingConfig, right: GratingConfig
) -> float:
    """N such that N * diffracted_amplitude has unit norm."""
    return norm_integral_analytic(state, left, right) ** -0.5


def norm_integral_quadrature(
    state: GaussianEntangledState,
    left: GratingConfig,
    right: GratingConfig,
    spec: QuadratureSpec | None = None,
) -> float:
    """Brute quadrature of |diffracted amplitude|^2; oracle for the closed form."""
    if spec is None:
        spec = QuadratureSpec(order=128, box_halfwidth=10.0)

    def integrand(p, q):
        return np.abs(diffracted_amplitude(state, left, right, p, q)) ** 2

    value, _ = quad2d(integrand, spec)
    return value


def pattern_slice(
    state: GaussianEntangledState,
    left: GratingConfig,
    right: GratingConfig,
    fixed_p: float,
    q_axis,
) -> PatternGrid:
    """Joint detection probability along q at fixed p, |N Phi(p, q)|^2.

    The full joint distribution is normalized; a single slice is not, which
    the grid's normalization tag records.
    """
    axis = Axis("q", np.asarray(q_axis, dtype=float))
    factor = normalization_factor(state, left, right)
    amp = diffracted_amplitude(state, left, right, float(fixed_p), axis.values)
    values = np.abs(factor * amp) ** 2
    meta = {
        "Q": state.q_spread,
        "Q_star": state.q_star_spread,
        "P": state.p_coupling,
        "K_L": left.k,
        "K_R": right.k,
        "w": left.w,
        "n_max_left": left.n_max,
        "n_max_right": right.n_max,
        "fixed_p": float(fixed_p),
    }
    return PatternGrid(axes=(axis,), values=values, normalization=UNNORMALIZED_SLICE, meta=meta)
