"""Run configuration: key=value config files and the figure presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError

EXPERIMENTS = (
    "single-mode-momentum",
    "single-mode-position",
    "multimode-slice",
    "identical-slice",
    "complementarity-sweep",
    "discontinuity-probe",
)

STATISTICS_NAMES = ("boson", "fermion")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for one run; unused fields stay None."""

    experiment: str
    q_spread: float | None = None
    q_star_spread: float | None = None
    p_couplings: tuple[float, ...] | None = None
    k_left: float | None = None
    k_right: float | None = None
    k: float | None = None
    w: float | None = None
    n_max: int | None = None
    tail_tol: float | None = None
    p: float | None = None
    q: float | None = None
    fixed_p: float | None = None
    statistics: tuple[str, ...] | None = None
    q_min: float | None = None
    q_max: float | None = None
    q_step: float | None = None
    x_min: float | None = None
    x_max: float | None = None
    x_step: float | None = None
    y_min: float | None = None
    y_max: float | None = None
    y_step: float | None = None
    epsilons: tuple[float, ...] | None = None
    max_separation: float | None = None


def _parse_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc
    if math.isnan(value):
        raise ConfigError(f"cannot parse number {text!r}")
    return value


def _parse_finite(text: str) -> float:
    value = _parse_float(text)
    if math.isinf(value):
        raise ConfigError(f"value {text!r} must be finite")
    return value


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p for chunk in text.split(",") for p in chunk.split()] if text else []
    if not parts:
        raise ConfigError("empty list value")
    return tuple(_parse_float(p) for p in parts)


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer {text!r}") from exc


def _parse_statistics(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    if not parts:
        raise ConfigError("empty statistics list")
    for p in parts:
        if p not in STATISTICS_NAMES:
            raise ConfigError(f"unknown statistics {p!r}; expected boson or fermion")
    if len(set(parts)) != len(parts):
        raise ConfigError("duplicate statistics entry")
    return parts


def _parse_experiment(text: str) -> str:
    if text not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {text!r}; expected one of {', '.join(EXPERIMENTS)}")
    return text


# key -> (RunConfig attribute, parser)
_KEYS = {
    "experiment": ("experiment", _parse_experiment),
    "Q": ("q_spread", _parse_finite),
    "Q_star": ("q_star_spread", _parse_finite),
    "P": ("p_couplings", _parse_float_list),
    "K_L": ("k_left", _parse_finite),
    "K_R": ("k_right", _parse_finite),
    "K": ("k", _parse_finite),
    "w": ("w", _parse_finite),
    "n_max": ("n_max", _parse_int),
    "tail_tol": ("tail_tol", _parse_finite),
    "p": ("p", _parse_finite),
    "q": ("q", _parse_finite),
    "fixed_p": ("fixed_p", _parse_finite),
    "statistics": ("statistics", _parse_statistics),
    "q_min": ("q_min", _parse_finite),
    "q_max": ("q_max", _parse_finite),
    "q_step": ("q_step", _parse_finite),
    "x_min": ("x_min", _parse_finite),
    "x_max": ("x_max", _parse_finite),
    "x_step": ("x_step", _parse_finite),
    "y_min": ("y_min", _parse_finite),
    "y_max": ("y_max", _parse_finite),
    "y_step": ("y_step", _parse_finite),
    "epsilons": ("epsilons", _parse_float_list),
    "max_separation": ("max_separation", _parse_finite),
}

_GRID_TRIPLES = {"q": ("q_min", "q_max", "q_step"), "x": ("x_min", "x_max", "x_step"), "y": ("y_min", "y_max", "y_step")}

# required keys per experiment; "truncation" stands for n_max-or-tail_tol,
# grid names expand to their min/max/step triple
_REQUIRED = {
    "single-mode-momentum": ("p", "q", "K_L", "K_R", "w", "truncation"),
    "single-mode-position": ("p", "q", "K_L", "K_R", "w", "truncation", "x-grid", "y-grid"),
    "multimode-slice": ("Q", "Q_star", "P", "K_L", "K_R", "w", "fixed_p", "truncation", "q-grid"),
    "identical-slice": ("Q", "Q_star", "P", "K", "w", "fixed_p", "statistics", "truncation", "q-grid"),
    "complementarity-sweep": ("Q", "Q_star", "P"),
    "discontinuity-probe": ("p", "K_L", "K_R", "w", "truncation", "epsilons", "x-grid"),
}

_OPTIONAL = {
    "discontinuity-probe": ("max_separation",),
}


def parse_config(text: str) -> RunConfig:
    """Parse a line-oriented ``key = value`` document into a RunConfig.

    ``#`` starts a comment line; unknown or duplicate keys are rejected with
    the offending line number.
    """
    seen: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        attr, parser = _KEYS[key]
        try:
            seen[key] = (attr, parser(value))
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from None
    if "experiment" not in seen:
        raise ConfigError("missing key 'experiment'")
    config = RunConfig(
        **{attr: parsed for attr, parsed in seen.values()}
    )
    validate_config(config)
    return config


def _require(present: bool, message: str) -> None:
    if not present:
        raise ConfigError(message)


def validate_config(config: RunConfig) -> None:
    """Check completeness and value ranges for the chosen experiment."""
    if config.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    required = _REQUIRED[config.experiment]

    allowed_attrs = {"experiment"}
    for item in required:
        if item == "truncation":
            allowed_attrs.update({"n_max", "tail_tol"})
        elif item.endswith("-grid"):
            allowed_attrs.update(_GRID_TRIPLES[item[0]])
        else:
            allowed_attrs.add(_KEYS[item][0])
    for item in _OPTIONAL.get(config.experiment, ()):
        allowed_attrs.add(_KEYS[item][0])
    for f in fields(config):
        if getattr(config, f.name) is not None and f.name not in allowed_attrs:
            raise ConfigError(
                f"key for {f.name!r} does not apply to experiment {config.experiment!r}"
            )

    for item in required:
        if item == "truncation":
            if config.n_max is None and config.tail_tol is None:
                raise ConfigError("missing truncation: give n_max or tail_tol")
            if config.n_max is not None and config.tail_tol is not None:
                raise ConfigError("give n_max or tail_tol, not both")
        elif item.endswith("-grid"):
            lo_k, hi_k, step_k = _GRID_TRIPLES[item[0]]
            lo, hi, step = (getattr(config, k) for k in (lo_k, hi_k, step_k))
            _require(lo is not None and hi is not None and step is not None,
                     f"missing grid keys {lo_k}/{hi_k}/{step_k}")
            if not (step > 0 and hi > lo):
                raise ConfigError(f"grid {item[0]}: need {hi_k} > {lo_k} and {step_k} > 0")
        else:
            attr = _KEYS[item][0]
            _require(getattr(config, attr) is not None, f"missing key {item!r}")

    for name, attr in (("Q", "q_spread"), ("Q_star", "q_star_spread")):
        v = getattr(config, attr)
        if v is not None and not v > 0:
            raise ConfigError(f"{name} must be positive (spread)")
    if config.p_couplings is not None:
        for v in config.p_couplings:
            if not v > 0:
                raise ConfigError("P must be positive (spread); use 'inf' for the product state")
    for name in ("k_left", "k_right", "k"):
        v = getattr(config, name)
        if v is not None and not v > 0:
            raise ConfigError(f"{name.replace('_', ' ')} must be positive")
    if config.w is not None and not 0.0 <= config.w <= 50.0:
        raise ConfigError("w must lie in [0, 50]")
    if config.n_max is not None and config.n_max < 1:
        raise ConfigError("n_max must be >= 1")
    if config.tail_tol is not None and not 0.0 < config.tail_tol < 1.0:
        raise ConfigError("tail_tol must lie in (0, 1)")
    if config.epsilons is not None and any(e < 0 for e in config.epsilons):
        raise ConfigError("epsilons must be non-negative")
    if config.max_separation is not None and not config.max_separation > 0:
        raise ConfigError("max_separation must be positive")


def config_lines(config: RunConfig) -> list[tuple[str, object]]:
    """(key, value) pairs that reproduce this config, in declaration order."""
    out: list[tuple[str, object]] = []
    for key, (attr, _) in _KEYS.items():
        value = getattr(config, attr)
        if value is not None:
            out.append((key, value))
    return out


# Figure presets.  The pulse area is not dictated by the reproduced figures;
# w = 0.3 keeps the fitted widths consistent across coupling spreads and is
# recorded in every manifest.
PRESET_PULSE_AREA = 0.3

_FIG_GRID = {"q_min": -4.0, "q_max": 4.0, "q_step": 0.02}

PRESETS: dict[str, RunConfig] = {
    "fig2": RunConfig(
        experiment="multimode-slice",
        q_spread=1.0,
        q_star_spread=0.9,
        p_couplings=(math.inf, 1.1, 0.75),
        k_left=0.2,
        k_right=0.3,
        w=PRESET_PULSE_AREA,
        n_max=2,
        fixed_p=0.0,
        **_FIG_GRID,
    ),
    "fig4": RunConfig(
        experiment="identical-slice",
        q_spread=1.0,
        q_star_spread=0.9,
        p_couplings=(200.0, 1.1, 0.75),
        k=0.2,
        w=PRESET_PULSE_AREA,
        n_max=2,
        fixed_p=0.0,
        statistics=("boson", "fermion"),
        **_FIG_GRID,
    ),
}

PRESET_DESCRIPTIONS = {
    "fig2": "two-grating Gaussian pair, P(0, q) slices for P = inf, 1.1, 0.75",
    "fig4": "single-grating identical pair, boson and fermion slices for P = 200, 1.1, 0.75",
}


def preset(name: str) -> RunConfig:
    try:
        config = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from None
    validate_config(config)
    return config


def with_tail_tolerance(config: RunConfig, tail_tol: float) -> RunConfig:
    """Replace a fixed order cutoff by automatic truncation."""
    if not 0.0 < tail_tol < 1.0:
        raise ConfigError("tail_tol must lie in (0, 1)")
    return replace(config, n_max=None, tail_tol=tail_tol)
