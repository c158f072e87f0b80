"""Two-particle Kapitza-Dirac diffraction at desk scale.

Single-mode interference channels, Gaussian multimode joint-detection
patterns, Schmidt-number/overlap complementarity, and boson/fermion exchange
effects, each validated against independent numerical oracles.
"""

from .errors import (
    ConfigError,
    ContractError,
    ConvergenceError,
    DegenerateStateError,
    DomainError,
    NumericsError,
)
from .grating import AmplitudeTable, GratingConfig, amplitude, amplitude_table, choose_truncation
from .grids import Axis, DataTable, PatternGrid
from .identical import (
    IdenticalPairState,
    OverlapEstimate,
    ParticleStatistics,
    complementarity_sweep,
    diffracted_identical_amplitude,
    normalization_identical,
    overlap,
    overlap_analytic,
    overlap_quadrature,
    pattern_identical_slice,
    symmetrize,
)
from .multimode import (
    GaussianEntangledState,
    diffracted_amplitude,
    initial_amplitude,
    norm_integral_analytic,
    normalization_factor,
    pattern_slice,
    schmidt_number,
)
from .numerics import (
    GaussianFitResult,
    QuadratureSpec,
    QuadScheme,
    bessel_jn,
    fit_gaussian,
    quad2d,
    schmidt_via_svd,
)
from .runconfig import PRESETS, RunConfig, parse_config, preset
from .single_mode import (
    Branch,
    BranchKind,
    InterferenceChannelGroup,
    SingleModePair,
    discontinuity_probe,
    find_channels,
    grating_profile,
    momentum_joint_probability,
    position_pattern,
    total_detection_probability,
    window_points,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
