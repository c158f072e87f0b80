"""Thin-grating diffraction amplitudes in the Raman-Nath regime.

A standing light wave of wavenumber ``k`` (hbar = 1, momenta in units of the
reference spread Q) scatters an incoming plane wave into orders shifted by
2*n*k with amplitude ``b_n = i^n e^{-iw} J_n(-w)``, where ``w`` is the pulse
area of the interaction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .numerics import MAX_BESSEL_ORDER, bessel_j_all

MAX_PULSE_AREA = 50.0

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _check_pulse_area(w: float) -> None:
    if not (math.isfinite(w) and 0.0 <= w <= MAX_PULSE_AREA):
        raise DomainError(f"pulse area w={w!r} outside supported range [0, {MAX_PULSE_AREA}]")


@dataclass(frozen=True)
class GratingConfig:
    """One standing-wave grating: pulse area, wavenumber and order cutoff.

    ``tail_tol`` records the tolerance used when the cutoff was chosen
    automatically; it is informational only.
    """

    w: float
    k: float
    n_max: int
    tail_tol: float | None = None

    def __post_init__(self) -> None:
        _check_pulse_area(self.w)
        if not (math.isfinite(self.k) and self.k > 0):
            raise DomainError(f"wavenumber k={self.k!r} must be positive")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max={self.n_max!r} must be a positive integer")
        if self.n_max > MAX_BESSEL_ORDER:
            raise DomainError(f"n_max={self.n_max} exceeds the supported order {MAX_BESSEL_ORDER}")

    @classmethod
    def auto_truncated(cls, w: float, k: float, tail_tol: float) -> "GratingConfig":
        """Build a config whose cutoff keeps the lost amplitude mass below tail_tol."""
        return cls(w=w, k=k, n_max=choose_truncation(w, tail_tol), tail_tol=tail_tol)


@dataclass(frozen=True)
class AmplitudeTable:
    """Complex diffraction amplitudes b_n for |n| <= n_max at pulse area w."""

    w: float
    amplitudes: dict[int, complex]
    tail_mass: float

    @property
    def n_max(self) -> int:
        return max(self.amplitudes)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Orders and amplitudes as aligned arrays, ascending in n."""
        ns = np.arange(-self.n_max, self.n_max + 1)
        return ns, np.array([self.amplitudes[int(n)] for n in ns])


def amplitude(n: int, w: float) -> complex:
    """Diffraction amplitude b_n = i^n e^{-iw} J_n(-w) for one order."""
    n = int(n)
    if abs(n) > MAX_BESSEL_ORDER:
        raise DomainError(f"order n={n} outside supported range |n| <= {MAX_BESSEL_ORDER}")
    _check_pulse_area(w)
    # J_n(-w) with the index sign folded in: J_{-n}(-w) = J_n(w) and
    # J_n(-w) = (-1)^n J_n(w), so |b_n| = |J_n(w)| and b_{-n} = b_n.
    jn = bessel_j_all(abs(n), -w)[abs(n)]
    if n < 0 and n % 2:
        jn = -jn
    return _I_POWERS[n % 4] * cmath.exp(-1j * w) * jn


@lru_cache(maxsize=128)
def _amplitude_arrays(w: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    js = bessel_j_all(n_max, -w)
    ns = np.arange(-n_max, n_max + 1)
    jn = js[np.abs(ns)]
    jn[(ns < 0) & (ns % 2 != 0)] *= -1.0
    phases = np.array([_I_POWERS[int(n) % 4] for n in ns])
    b = phases * cmath.exp(-1j * w) * jn
    b.setflags(write=False)
    ns.setflags(write=False)
    return ns, b


def amplitude_arrays(config: GratingConfig) -> tuple[np.ndarray, np.ndarray]:
    """(orders, b_n) arrays for a grating config; cached for reuse on grids."""
    return _amplitude_arrays(config.w, config.n_max)


def amplitude_table(config: GratingConfig) -> AmplitudeTable:
    """All amplitudes of a grating, with the achieved tail mass recorded."""
    ns, b = amplitude_arrays(config)
    total = float(np.sum(np.abs(b) ** 2))
    if total > 1.0 + 1e-9:
        raise DomainError(f"amplitude table carries total weight {total} > 1")
    return AmplitudeTable(
        w=config.w,
        amplitudes={int(n): complex(v) for n, v in zip(ns, b)},
        tail_mass=max(0.0, 1.0 - total),
    )


def choose_truncation(w: float, tail_tolerance: float) -> int:
    """Smallest order cutoff keeping sum_{|n|<=n_max} |b_n|^2 >= 1 - tail_tolerance.

    Never returns less than 1, the minimum admissible cutoff.
    """
    _check_pulse_area(w)
    if not (0.0 < tail_tolerance < 1.0):
        raise DomainError(f"tail_tolerance={tail_tolerance!r} must lie in (0, 1)")
    js = bessel_j_all(MAX_BESSEL_ORDER, w)
    total = js[0] * js[0]
    if total >= 1.0 - tail_tolerance:
        return 1
    for n in range(1, MAX_BESSEL_ORDER + 1):
        total += 2.0 * js[n] * js[n]
        if total >= 1.0 - tail_tolerance:
            return max(1, n)
    raise DomainError(
        f"tail tolerance {tail_tolerance} unreachable within order {MAX_BESSEL_ORDER} at w={w}"
    )
