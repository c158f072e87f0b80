"""Exchange effects for identical particles diffracted by one grating.

The Gaussian pair state is (anti)symmetrized with prefactor
``(2 +- 2 theta)^(-1/2)`` where theta is the mode overlap; bosons take the
plus sign, fermions the minus.  A symmetric base state (Q = Q*) has
theta = 1, so the fermionic combination degenerates to 0/0 and cannot be
prepared, while the bosonic one reduces to the plain entangled pair and all
exchange effects cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateStateError, DomainError, NumericsError
from .grating import GratingConfig, amplitude_arrays
from .grids import Axis, DataTable, PatternGrid, UNNORMALIZED_SLICE
from .multimode import (
    GaussianEntangledState,
    _require_normalizable,
    initial_amplitude,
    norm_integral_analytic,
    schmidt_number,
)
from .numerics import QuadratureSpec, quad2d

FERMION_DEGENERACY_TOL = 1e-9  # below 1 - theta < this the (2 - 2 theta)^(-1/2) prefactor is meaningless

ANALYTIC = "analytic"
QUADRATURE = "quadrature"


class ParticleStatistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def sign(self) -> int:
        return 1 if self is ParticleStatistics.BOSON else -1


def overlap_analytic(state: GaussianEntangledState) -> float:
    """Closed-form mode overlap theta of the normalized pair state.

    Written in powers of 1/P^2 so the product limit P = inf is exact, where
    theta = 2 Q Q* / (Q^2 + Q*^2).  Valid for P^4 >= Q^4 Q*^4 / (Q^2+Q*^2)^2,
    which every normalizable state satisfies.
    """
    q2 = state.q_spread**2
    qs2 = state.q_star_spread**2
    ip4 = state.inv_p_sq**2
    num = 4.0 - q2 * qs2 * ip4
    den = (q2 + qs2) ** 2 - (q2 * qs2) ** 2 * ip4
    if num < 0 or den <= 0:
        raise DomainError(
            "overlap closed form invalid: P^4 < Q^4 Q*^4 / (Q^2 + Q*^2)^2"
        )
    theta = state.q_spread * state.q_star_spread * math.sqrt(num / den)
    return min(1.0, theta)


def _auto_quadrature_spec(state: GaussianEntangledState) -> QuadratureSpec:
    # Box scaled to the widest principal axis of |Phi_0|^2 so the tails
    # dropped at the edge stay below ~1e-21 of the peak.
    q2 = state.q_spread**2
    qs2 = state.q_star_spread**2
    ip2 = state.inv_p_sq
    mean = 1.0 / q2 + 1.0 / qs2
    split = math.sqrt((1.0 / q2 - 1.0 / qs2) ** 2 + ip2 * ip2)
    lam_min = mean - split  # smallest eigenvalue of the pair-exchange form, > 0 when normalizable
    if lam_min <= 0:
        raise DomainError("state is not normalizable; overlap quadrature undefined")
    box = max(8.0, 7.5 / math.sqrt(lam_min))
    order = max(96, int(10 * box))
    return QuadratureSpec(order=order, box_halfwidth=box)


def overlap_quadrature(
    state: GaussianEntangledState, spec: QuadratureSpec | None = None
) -> float:
    """theta as a ratio of quadratures of Phi0*(p,q) Phi0(q,p) and |Phi0|^2."""
    _require_normalizable(state)
    if spec is None:
        spec = _auto_quadrature_spec(state)

    def crossed(p, q):
        return initial_amplitude(state, p, q) * initial_amplitude(state, q, p)

    def direct(p, q):
        return initial_amplitude(state, p, q) ** 2

    num, _ = quad2d(crossed, spec)
    den, _ = quad2d(direct, spec)
    if den <= 0 or not math.isfinite(num / den):
        raise NumericsError(f"overlap quadrature failed: num={num!r}, den={den!r}")
    return num / den


@dataclass(frozen=True)
class OverlapEstimate:
    value: float
    method: str


def overlap(state: GaussianEntangledState) -> OverlapEstimate:
    """Closed-form overlap when valid, quadrature otherwise, with a provenance tag."""
    try:
        return OverlapEstimate(overlap_analytic(state), ANALYTIC)
    except DomainError:
        return OverlapEstimate(overlap_quadrature(state), QUADRATURE)


@dataclass(frozen=True)
class IdenticalPairState:
    """(Anti)symmetrized Gaussian pair behind a single grating."""

    base: GaussianEntangledState
    statistics: ParticleStatistics
    overlap: float
    overlap_method: str
    grating: GratingConfig


def symmetrize(
    base: GaussianEntangledState,
    statistics: ParticleStatistics,
    grating: GratingConfig,
) -> IdenticalPairState:
    """Build the normalized (anti)symmetrized pair.

    Fermions with a symmetric base (theta = 1 within 1e-9) are rejected:
    the normalization prefactor degenerates and the state is undefined.
    """
    _require_normalizable(base)
    est = overlap(base)
    if statistics is ParticleStatistics.FERMION and 1.0 - est.value < FERMION_DEGENERACY_TOL:
        raise DegenerateStateError(
            "fermion pair with symmetric spatial state: state undefined (0/0)"
        )
    return IdenticalPairState(
        base=base,
        statistics=statistics,
        overlap=est.value,
        overlap_method=est.method,
        grating=grating,
    )


def _unnormalized_identical_amplitude(pair: IdenticalPairState, p, q):
    state = pair.base
    ns, b = amplitude_arrays(pair.grating)
    k = pair.grating.k
    sign = pair.statistics.sign
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    acc = np.zeros(np.broadcast(p, q).shape, dtype=complex)
    for n, bn in zip(ns, b):
        ps = p - 2.0 * n * k
        qs = q - 2.0 * n * k
        for m, bm in zip(ns, b):
            shift = 2.0 * m * k
            term = initial_amplitude(state, ps, q - shift) + sign * initial_amplitude(
                state, qs, p - shift
            )
            acc = acc + (bn * bm) * term
    return acc


def _crossed_norm_sum(pair: IdenticalPairState) -> float:
    """Quadruple lattice sum of the crossed (exchange) Gaussian integrals.

    The crossed integral couples the p-linear coefficient mu_bar and the
    q-linear coefficient mu through the symmetric form with inverse width
    xi^-2 = Q^-2 + Q*^-2; its prefactor is pi xi^2 (1 - xi^4/P^4)^(-1/2),
    valid for P^4 >= xi^4 (implied by normalizability).  Verified against
    brute quadrature of the symmetrized state.
    """
    state = pair.base
    q2 = state.q_spread**2
    qs2 = state.q_star_spread**2
    ip2 = state.inv_p_sq
    k = pair.grating.k
    xi_inv2 = 1.0 / q2 + 1.0 / qs2
    det = xi_inv2 * xi_inv2 - ip2 * ip2
    if det <= 0:
        raise DomainError("crossed normalization term invalid: P^4 < xi^4")
    pref = math.pi / math.sqrt(det)

    ns, b = amplitude_arrays(pair.grating)
    nn = ns[:, None, None].astype(float)
    mm = ns[None, :, None].astype(float)
    rr = ns[None, None, :].astype(float)
    bn = b[:, None, None]
    bm = b[None, :, None]
    br = b[None, None, :]
    k2 = 4.0 * k * k
    total = 0.0 + 0.0j
    for s_idx, s in enumerate(ns):
        s = float(s)
        mu = 2.0 * k * (2.0 * mm / qs2 + 2.0 * rr / q2 + (s + nn) * ip2)
        mu_bar = 2.0 * k * (2.0 * nn / q2 + 2.0 * s / qs2 + (mm + rr) * ip2)
        # lattice constants and the completed square share one exponential;
        # split they overflow for generous cutoffs, combined they are bounded
        expo = (
            -k2 * ((nn * nn + rr * rr) / q2 + (mm * mm + s * s) / qs2 + (nn * mm + rr * s) * ip2)
            + (xi_inv2 * (mu * mu + mu_bar * mu_bar) - 2.0 * ip2 * mu * mu_bar) / (4.0 * det)
        )
        total += b[s_idx] * np.sum(np.conj(bn * bm) * br * np.exp(expo))
    return pref * float(total.real)


def norm_integral_identical(pair: IdenticalPairState) -> float:
    """Integral of the unnormalized (anti)symmetrized diffracted state.

    2 * direct +- 2 * crossed; the direct term is the two-grating lattice sum
    with both wavenumbers equal to the single grating's.
    """
    direct = norm_integral_analytic(pair.base, pair.grating, pair.grating)
    crossed = _crossed_norm_sum(pair)
    value = 2.0 * direct + pair.statistics.sign * 2.0 * crossed
    if not math.isfinite(value) or value <= 0:
        raise NumericsError(f"identical-pair normalization integral is {value!r}")
    return value


def norm_integral_identical_quadrature(
    pair: IdenticalPairState, spec: QuadratureSpec | None = None
) -> float:
    """Brute quadrature of the same integral; oracle for the lattice sum."""
    if spec is None:
        spec = QuadratureSpec(order=128, box_halfwidth=10.0)

    def integrand(p, q):
        return np.abs(_unnormalized_identical_amplitude(pair, p, q)) ** 2

    value, _ = quad2d(integrand, spec)
    return value


def normalization_identical(pair: IdenticalPairState) -> float:
    """Normalization factor N of the (anti)symmetrized diffracted state."""
    return norm_integral_identical(pair) ** -0.5


def diffracted_identical_amplitude(pair: IdenticalPairState, p, q):
    """Normalized amplitude; exactly zero at p = q for fermions."""
    factor = normalization_identical(pair)
    amp = factor * _unnormalized_identical_amplitude(pair, p, q)
    if amp.ndim == 0:
        return complex(amp)
    return amp


def pattern_identical_slice(pair: IdenticalPairState, fixed_p: float, q_axis) -> PatternGrid:
    """|normalized amplitude|^2 along q at fixed p."""
    axis = Axis("q", np.asarray(q_axis, dtype=float))
    factor = normalization_identical(pair)
    amp = factor * _unnormalized_identical_amplitude(pair, float(fixed_p), axis.values)
    meta = {
        "Q": pair.base.q_spread,
        "Q_star": pair.base.q_star_spread,
        "P": pair.base.p_coupling,
        "K": pair.grating.k,
        "w": pair.grating.w,
        "n_max": pair.grating.n_max,
        "statistics": pair.statistics.value,
        "overlap": pair.overlap,
        "overlap_method": pair.overlap_method,
        "fixed_p": float(fixed_p),
    }
    return PatternGrid(
        axes=(axis,), values=np.abs(amp) ** 2, normalization=UNNORMALIZED_SLICE, meta=meta
    )


def entangled_domain_lower_bound(q_spread: float, q_star_spread: float) -> float:
    """Smallest P with a normalizable state, (Q Q*/2)^(1/2)."""
    return math.sqrt(q_spread * q_star_spread / 2.0)


def complementarity_sweep(q_spread: float, q_star_spread: float, p_axis) -> DataTable:
    """Schmidt number and overlap across coupling spreads.

    The two move oppositely: entanglement blows up at the lower edge of the
    domain where the overlap vanishes, and collapses to 1 at P -> inf where
    the overlap is maximal.
    """
    bound = entangled_domain_lower_bound(q_spread, q_star_spread)
    rows = []
    for p in np.asarray(p_axis, dtype=float):
        if not p > bound:
            raise DomainError(
                f"P={p!r} outside the entangled domain ({bound}, inf) for these spreads"
            )
        state = GaussianEntangledState(q_spread, q_star_spread, p)
        rows.append((p, schmidt_number(state), overlap(state).value))
    return DataTable(columns=("P", "schmidt", "overlap"), rows=np.array(rows))
