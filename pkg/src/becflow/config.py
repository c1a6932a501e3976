"""Strict key-value run configuration: parsing, defaults, canonical echo.

The format is one `key = value` per line with `#` comments.  Unknown keys
are hard errors (a typo silently falling back to a default would destroy
reproducibility), duplicates are rejected, and floats are serialized with 17
significant digits so the echoed config re-parses to bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .initial import Profile
from .params import ModelParameters, check_admissibility

__all__ = ["RunConfig", "ConfigError", "parse_config", "serialize_config"]

MODES = ("single", "eps_study", "k_sweep", "m_bisect")
INITIAL_KINDS = ("constant", "bump", "concentration", "custom_table")

# key -> value type; "floats"/"ints" are comma-separated lists
_SCHEMA = {
    "n": float,
    "alpha": float,
    "beta": float,
    "gamma": float,
    "kappa": float,
    "length": float,
    "epsilon": float,
    "grid.cells": int,
    "grid.grading": float,
    "initial.kind": str,
    "initial.c": float,
    "initial.center": float,
    "initial.width": float,
    "initial.height": float,
    "initial.baseline": float,
    "initial.base_c": float,
    "initial.k": int,
    "initial.theta": float,
    "initial.phi_center": float,
    "initial.phi_width": float,
    "initial.phi_height": float,
    "initial.table": str,
    "time.t_end": float,
    "time.dt_init": float,
    "time.dt_min": float,
    "time.dt_max": float,
    "time.sample_interval": float,
    "time.max_steps": int,
    "time.scheme": str,
    "thresholds.supnorm_threshold": float,
    "thresholds.newton_tolerance": float,
    "thresholds.positivity_floor": float,
    "output_dir": str,
    "mode": str,
    "eps_study.eps_list": "floats",
    "k_sweep.k_list": "ints",
    "bisect.k_low": int,
    "bisect.k_high": int,
}


class ConfigError(ValueError):
    """Configuration problem, annotated with its source position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({where})"
        super().__init__(message)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved experiment description; every field has a concrete value
    except the optional overrides that default at run time."""

    parameters: ModelParameters
    grid_cells: int
    grading_exponent: float
    initial: Profile
    t_end: float
    dt_init: float
    dt_min: float
    dt_max: float
    sample_interval: float
    max_steps: int | None
    time_scheme: str
    supnorm_threshold: float | None
    newton_tolerance: float
    positivity_floor: float
    output_dir: str
    mode: str
    eps_list: tuple[float, ...]
    k_list: tuple[int, ...]
    k_low: int
    k_high: int

    def with_epsilon(self, epsilon: float) -> "RunConfig":
        return replace(self, parameters=replace(self.parameters, epsilon=epsilon))

    def with_k(self, k: int) -> "RunConfig":
        if self.initial.kind != "concentration":
            raise ConfigError("k overrides need a concentration initial profile")
        return replace(self, initial=replace(self.initial, k=int(k)))


def _parse_lines(text: str) -> dict[str, tuple[str, int, int]]:
    entries: dict[str, tuple[str, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        value = value_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno, key_col)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno, key_col)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno, line.index("=") + 2)
        entries[key] = (value, lineno, line.index("=") + 2)
    return entries


def _convert(key: str, value: str, lineno: int, col: int):
    kind = _SCHEMA[key]
    try:
        if kind is float:
            return float(value)
        if kind is int:
            return int(value)
        if kind is str:
            return value
        if kind == "floats":
            return tuple(float(v) for v in value.split(","))
        if kind == "ints":
            return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse value {value!r} for key {key!r}", lineno, col) from None
    raise AssertionError(kind)


def parse_config(text: str, check: bool = True) -> RunConfig:
    """Parse a configuration document, fill defaults, verify admissibility.

    With check=True (the default) the resolved parameters must pass the
    existence admissibility window, and additionally the blow-up window when
    the run uses concentration data or a sweep/bisection mode; every violated
    constraint is reported at once.
    """
    entries = _parse_lines(text)
    values = {k: _convert(k, v, ln, col) for k, (v, ln, col) in entries.items()}

    for required in ("n", "alpha", "beta", "kappa", "length"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")

    alpha = values["alpha"]
    beta = values["beta"]
    if "gamma" in values:
        gamma = values["gamma"]
    else:
        gamma = 0.5 * (max(5.0 - alpha + beta, -1.0) + 1.0)

    try:
        params = ModelParameters(
            n=values["n"], alpha=alpha, beta=beta, gamma=gamma,
            kappa=values["kappa"], length=values["length"],
            epsilon=values.get("epsilon", 1e-3),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    length = params.length
    kind = values.get("initial.kind", "constant")
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"initial.kind must be one of {INITIAL_KINDS}, got {kind!r}")
    initial = Profile(
        kind=kind,
        c=values.get("initial.c", 1.0),
        center=values.get("initial.center", 0.5 * length),
        width=values.get("initial.width", 0.2 * length),
        height=values.get("initial.height", 1.0),
        baseline=values.get("initial.baseline", 0.0),
        base_c=values.get("initial.base_c", 0.1),
        k=values.get("initial.k", 1),
        theta=values.get("initial.theta"),
        phi_center=values.get("initial.phi_center", 0.5 * length),
        phi_width=values.get("initial.phi_width", 0.25 * length),
        phi_height=values.get("initial.phi_height", 1.0),
        table_path=values.get("initial.table"),
    )
    if kind == "concentration" and initial.theta is None:
        window_lo = params.beta + 1.0 - params.kappa
        window_hi = params.beta + 1.0
        initial = replace(initial, theta=0.5 * (window_lo + window_hi))

    scheme = values.get("time.scheme", "euler")
    if scheme not in ("euler", "trapezoid"):
        raise ConfigError(f"time.scheme must be 'euler' or 'trapezoid', got {scheme!r}")

    mode = values.get("mode", "single")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")

    t_end = values.get("time.t_end", 1.0)
    if t_end <= 0.0:
        raise ConfigError(f"time.t_end must be positive, got {t_end}")
    cfg = RunConfig(
        parameters=params,
        grid_cells=values.get("grid.cells", 256),
        grading_exponent=values.get("grid.grading", 2.0),
        initial=initial,
        t_end=t_end,
        dt_init=values.get("time.dt_init", 1e-6 * t_end),
        dt_min=values.get("time.dt_min", 1e-12 * t_end),
        dt_max=values.get("time.dt_max", 0.1 * t_end),
        sample_interval=values.get("time.sample_interval", 0.01 * t_end),
        max_steps=values.get("time.max_steps"),
        time_scheme=values.get("time.scheme", "euler"),
        supnorm_threshold=values.get("thresholds.supnorm_threshold"),
        newton_tolerance=values.get("thresholds.newton_tolerance", 1e-10),
        positivity_floor=values.get("thresholds.positivity_floor", 1e-12),
        output_dir=values.get("output_dir", "runs"),
        mode=mode,
        eps_list=values.get("eps_study.eps_list", (1e-2, 1e-3, 1e-4)),
        k_list=values.get("k_sweep.k_list", (1, 2, 4, 8, 16)),
        k_low=values.get("bisect.k_low", 1),
        k_high=values.get("bisect.k_high", 64),
    )

    if check:
        needs_blowup = kind == "concentration" or mode in ("k_sweep", "m_bisect")
        report = check_admissibility(params, mode="blowup" if needs_blowup else "existence")
        ok = report.blowup_ok if needs_blowup else report.existence_ok
        if not ok:
            listing = "; ".join(f"{name} (got {val:g})" for name, val in report.violated)
            raise ConfigError(f"parameters violate admissibility: {listing}")
    return cfg


def _fmt(x) -> str:
    if isinstance(x, bool):
        raise TypeError(x)
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form: fixed key order, 17-significant-digit floats.

    Re-parsing the output and serializing again is byte-identical, which is
    what makes the echoed config sufficient to reproduce a run.
    """
    p = cfg.parameters
    lines = [
        f"n = {_fmt(p.n)}",
        f"alpha = {_fmt(p.alpha)}",
        f"beta = {_fmt(p.beta)}",
        f"gamma = {_fmt(p.gamma)}",
        f"kappa = {_fmt(p.kappa)}",
        f"length = {_fmt(p.length)}",
        f"epsilon = {_fmt(p.epsilon)}",
        f"grid.cells = {cfg.grid_cells}",
        f"grid.grading = {_fmt(cfg.grading_exponent)}",
        f"initial.kind = {cfg.initial.kind}",
    ]
    ini = cfg.initial
    if ini.kind == "constant":
        lines.append(f"initial.c = {_fmt(ini.c)}")
    elif ini.kind == "bump":
        lines += [
            f"initial.center = {_fmt(ini.center)}",
            f"initial.width = {_fmt(ini.width)}",
            f"initial.height = {_fmt(ini.height)}",
            f"initial.baseline = {_fmt(ini.baseline)}",
        ]
    elif ini.kind == "concentration":
        lines += [
            f"initial.base_c = {_fmt(ini.base_c)}",
            f"initial.k = {ini.k}",
            f"initial.theta = {_fmt(ini.theta)}",
            f"initial.phi_center = {_fmt(ini.phi_center)}",
            f"initial.phi_width = {_fmt(ini.phi_width)}",
            f"initial.phi_height = {_fmt(ini.phi_height)}",
        ]
    elif ini.kind == "custom_table":
        lines.append(f"initial.table = {ini.table_path}")
    lines += [
        f"time.t_end = {_fmt(cfg.t_end)}",
        f"time.dt_init = {_fmt(cfg.dt_init)}",
        f"time.dt_min = {_fmt(cfg.dt_min)}",
        f"time.dt_max = {_fmt(cfg.dt_max)}",
        f"time.sample_interval = {_fmt(cfg.sample_interval)}",
        f"time.scheme = {cfg.time_scheme}",
    ]
    if cfg.max_steps is not None:
        lines.append(f"time.max_steps = {cfg.max_steps}")
    if cfg.supnorm_threshold is not None:
        lines.append(f"thresholds.supnorm_threshold = {_fmt(cfg.supnorm_threshold)}")
    lines += [
        f"thresholds.newton_tolerance = {_fmt(cfg.newton_tolerance)}",
        f"thresholds.positivity_floor = {_fmt(cfg.positivity_floor)}",
        f"output_dir = {cfg.output_dir}",
        f"mode = {cfg.mode}",
        "eps_study.eps_list = " + ",".join(_fmt(e) for e in cfg.eps_list),
        "k_sweep.k_list = " + ",".join(str(k) for k in cfg.k_list),
        f"bisect.k_low = {cfg.k_low}",
        f"bisect.k_high = {cfg.k_high}",
    ]
    return "\n".join(lines) + "\n"
