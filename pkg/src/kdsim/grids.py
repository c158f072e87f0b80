"""Sampled output containers shared by the physics modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

NORMALIZED_JOINT = "normalized-joint"
UNNORMALIZED_SLICE = "unnormalized-slice"
_NORMALIZATION_TAGS = (NORMALIZED_JOINT, UNNORMALIZED_SLICE)


@dataclass(frozen=True)
class Axis:
    """A named, strictly increasing sample axis."""

    name: str
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError(f"axis '{self.name}' must be a non-empty 1-D array")
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"axis '{self.name}' contains non-finite values")
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise DomainError(f"axis '{self.name}' must be strictly increasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class DataTable:
    """A plain column-oriented table, one row per record."""

    columns: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise DomainError("table rows must be 2-D with one column per name")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)


@dataclass(frozen=True)
class PatternGrid:
    """Joint-detection probability sampled over one or two axes.

    ``normalization`` tags whether the values are a slice of a normalized
    joint distribution or carry arbitrary units; ``meta`` records the state
    and grating parameters the samples were produced from.
    """

    axes: tuple[Axis, ...]
    values: np.ndarray
    normalization: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.normalization not in _NORMALIZATION_TAGS:
            raise DomainError(f"unknown normalization tag {self.normalization!r}")
        vals = np.asarray(self.values, dtype=float)
        expected = tuple(ax.values.size for ax in self.axes)
        if vals.shape != expected:
            raise DomainError(f"values shape {vals.shape} does not match axes {expected}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("pattern values contain non-finite entries")
        if np.any(vals < 0):
            raise DomainError("pattern values must be non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_table(self, value_column: str = "probability") -> DataTable:
        """Flatten to a table, first axis outermost, all axes ascending."""
        names = tuple(ax.name for ax in self.axes) + (value_column,)
        grids = np.meshgrid(*(ax.values for ax in self.axes), indexing="ij")
        cols = [g.reshape(-1) for g in grids] + [self.values.reshape(-1)]
        return DataTable(columns=names, rows=np.column_stack(cols))
