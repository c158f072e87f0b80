"""Joint detection for momentum-entangled single-mode pairs.

The pair starts in (|p>_L |q>_R + |q>_L |p>_R)/sqrt(2) and each side is
diffracted by its own grating.  In momentum space the observable quantities
are per-channel probabilities: photon-exchange histories landing on the same
final momentum pair are indistinguishable and their amplitudes add
coherently.  In position space the pattern follows from the grating profiles
``phi(x) = sum_n b_n exp(2 i n k x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DomainError
from .grating import GratingConfig, amplitude_arrays
from .grids import DataTable

MATCH_TOL = 1e-9  # channel momenta are exact rational combinations; this only absorbs float error

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class BranchKind(Enum):
    DIRECT = "direct"
    SWAPPED = "swapped"


class Branch(NamedTuple):
    n: int
    m: int
    kind: BranchKind


@dataclass(frozen=True)
class SingleModePair:
    """Initial momenta (p, q) and the two gratings they scatter from."""

    p: float
    q: float
    left: GratingConfig
    right: GratingConfig

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise DomainError("pair momenta must be finite")
        if self.left.w != self.right.w:
            raise DomainError("both gratings must share the same pulse area w")


@dataclass(frozen=True)
class InterferenceChannelGroup:
    """All branches that land on one final momentum pair (within MATCH_TOL)."""

    final_left: float
    final_right: float
    branches: tuple[Branch, ...]

    @property
    def is_interference(self) -> bool:
        return len(self.branches) >= 2


def _branch_finals(pair: SingleModePair, branch: Branch) -> tuple[float, float]:
    shift_l = 2.0 * branch.n * pair.left.k
    shift_r = 2.0 * branch.m * pair.right.k
    if branch.kind is BranchKind.DIRECT:
        return pair.p + shift_l, pair.q + shift_r
    return pair.q + shift_l, pair.p + shift_r


def _cluster(values: np.ndarray, tol: float) -> np.ndarray:
    # Chain clustering on sorted values; gaps below tol merge.
    order = np.argsort(values, kind="stable")
    labels = np.empty(values.size, dtype=int)
    label = -1
    prev = None
    for idx in order:
        v = values[idx]
        if prev is None or v - prev > tol:
            label += 1
        labels[idx] = label
        prev = v
    return labels


def find_channels(pair: SingleModePair, tol: float = MATCH_TOL) -> list[InterferenceChannelGroup]:
    """Enumerate all final momentum pairs and group coincident branches.

    Groups with two or more branches are interference channels; they exist
    only when the two momentum-matching conditions hold simultaneously,
    which requires a rational wavenumber ratio.
    """
    branches: list[Branch] = []
    finals_l: list[float] = []
    finals_r: list[float] = []
    for kind in (BranchKind.DIRECT, BranchKind.SWAPPED):
        for n in range(-pair.left.n_max, pair.left.n_max + 1):
            for m in range(-pair.right.n_max, pair.right.n_max + 1):
                br = Branch(n, m, kind)
                fl, fr = _branch_finals(pair, br)
                branches.append(br)
                finals_l.append(fl)
                finals_r.append(fr)
    fl_arr = np.array(finals_l)
    fr_arr = np.array(finals_r)
    labels_l = _cluster(fl_arr, tol)
    groups: dict[tuple[int, int], list[int]] = {}
    for cl in np.unique(labels_l):
        idx = np.flatnonzero(labels_l == cl)
        labels_r = _cluster(fr_arr[idx], tol)
        for i, cr in zip(idx, labels_r):
            groups.setdefault((int(cl), int(cr)), []).append(int(i))
    out = []
    for members in groups.values():
        brs = sorted(
            (branches[i] for i in members),
            key=lambda b: (b.kind is not BranchKind.DIRECT, b.n, b.m),
        )
        out.append(
            InterferenceChannelGroup(
                final_left=float(np.mean(fl_arr[members])),
                final_right=float(np.mean(fr_arr[members])),
                branches=tuple(brs),
            )
        )
    out.sort(key=lambda g: (g.final_left, g.final_right))
    return out


def group_amplitude_sum(
    left_amplitudes: dict[int, complex],
    right_amplitudes: dict[int, complex],
    group: InterferenceChannelGroup,
) -> complex:
    """Coherent amplitude of a channel group, each branch weighted 1/sqrt(2)."""
    return sum(
        _INV_SQRT2 * left_amplitudes[b.n] * right_amplitudes[b.m] for b in group.branches
    )


def momentum_joint_probability(
    pair: SingleModePair, group: InterferenceChannelGroup, tol: float = MATCH_TOL
) -> float:
    """|sum of branch amplitudes|^2 for one final momentum pair.

    Reduces to |b_n b_m|^2 / 2 for a singleton group and to the two-branch
    interference expression with the Re(b_n* b_m* b_n' b_m') cross term.
    """
    for br in group.branches:
        fl, fr = _branch_finals(pair, br)
        if abs(fl - group.final_left) > 10 * tol or abs(fr - group.final_right) > 10 * tol:
            raise ContractError(
                f"branch {br} does not map to the group's final momenta under this pair"
            )
    ns_l, b_l = amplitude_arrays(pair.left)
    ns_r, b_r = amplitude_arrays(pair.right)
    left = {int(n): complex(v) for n, v in zip(ns_l, b_l)}
    right = {int(n): complex(v) for n, v in zip(ns_r, b_r)}
    amp = group_amplitude_sum(left, right, group)
    return abs(amp) ** 2


def total_detection_probability(pair: SingleModePair) -> float:
    """Sum of momentum_joint_probability over all channel groups.

    Unity within the truncation tail for p != q; exactly doubled at p = q,
    where the two branch families coincide.
    """
    return sum(momentum_joint_probability(pair, g) for g in find_channels(pair))


def grating_profile(config: GratingConfig, x):
    """Truncated position-space profile ``sum_n b_n exp(2 i n k x)``.

    Periodic with period pi/k; approaches unit modulus as n_max grows.
    Accepts scalars or numpy arrays.
    """
    ns, b = amplitude_arrays(config)
    x_arr = np.asarray(x, dtype=float)
    phases = np.exp(2j * config.k * np.multiply.outer(x_arr, ns))
    out = phases @ b
    if x_arr.ndim == 0:
        return complex(out)
    return out


def position_pattern(pair: SingleModePair, x, y):
    """Joint position pattern ``(total, product_part)`` at (x, y).

    ``total`` is the unnormalized coincidence intensity |Psi(x, y)|^2,
    computed from the two-branch amplitude so it is non-negative by
    construction; ``product_part`` is the equal-weight mixture of the two
    product states.  Both are in arbitrary units (plane waves are not
    normalizable).
    """
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    f_lx = grating_profile(pair.left, x_arr)
    f_rx = grating_profile(pair.right, x_arr)
    f_ly = grating_profile(pair.left, y_arr)
    f_ry = grating_profile(pair.right, y_arr)
    direct = f_lx * f_ry * np.exp(1j * (pair.p * x_arr + pair.q * y_arr))
    swapped = f_ly * f_rx * np.exp(1j * (pair.p * y_arr + pair.q * x_arr))
    total = 0.5 * np.abs(direct + swapped) ** 2
    product_part = 0.5 * (
        np.abs(f_lx) ** 2 * np.abs(f_ry) ** 2 + np.abs(f_ly) ** 2 * np.abs(f_rx) ** 2
    )
    if np.ndim(total) == 0:
        return float(total), float(product_part)
    return total, product_part


def window_points(halfwidth: float, step: float, max_separation: float | None = None) -> np.ndarray:
    """(x, y) grid over [-halfwidth, halfwidth]^2, optionally restricted to
    |x - y| <= max_separation."""
    if not (halfwidth > 0 and step > 0):
        raise DomainError("halfwidth and step must be positive")
    count = int(round(2 * halfwidth / step)) + 1
    axis = np.linspace(-halfwidth, halfwidth, count)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([X.reshape(-1), Y.reshape(-1)])
    if max_separation is not None:
        pts = pts[np.abs(pts[:, 0] - pts[:, 1]) <= max_separation]
    return pts


def discontinuity_probe(
    pair: SingleModePair, epsilons: Sequence[float], points: np.ndarray
) -> DataTable:
    """Deviation of the near-equal-momentum pattern from the doubled product one.

    For each epsilon the second momentum is set to q = p + epsilon and the
    table records ``max |total - 2 * product_part|`` over the sample points.
    With equal wavenumbers the deviation vanishes as epsilon -> 0; the
    doubled product pattern is what survives at the discontinuity.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise DomainError("points must be a non-empty array of (x, y) pairs")
    eps_list = [float(e) for e in epsilons]
    if any(not math.isfinite(e) or e < 0 for e in eps_list):
        raise DomainError("epsilons must be finite and non-negative")
    rows = []
    for eps in eps_list:
        probe = replace(pair, q=pair.p + eps)
        total, pro = position_pattern(probe, pts[:, 0], pts[:, 1])
        rows.append((eps, float(np.max(np.abs(total - 2.0 * pro)))))
    return DataTable(columns=("epsilon", "max_deviation"), rows=np.array(rows))
