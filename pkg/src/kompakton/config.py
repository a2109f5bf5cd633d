"""Experiment configuration: key = value text format and validation.

The format is line oriented: one ``key = value`` pair per line, ``#`` starts
a comment, keys are case-sensitive.  Required keys: scheme, p, c, L, dt,
t_end, and exactly one of dx or M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .errors import ConfigParseError, KompaktonError, ParameterError
from .grid import CompactonSpec, GridSpec, TimeSpec, as_fraction
from .radiation import AnalysisSettings
from .schemes import Scheme
from .stepper import StepperConfig, TimeRule

_REQUIRED = ("scheme", "p", "c", "L", "dt", "t_end")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one simulation plus analysis settings."""

    scheme: Scheme
    p: Fraction
    c: float
    length: float
    num_nodes: int
    dt: float
    t_end: float
    rule: TimeRule = TimeRule.MIDPOINT
    c0: Optional[float] = None            # default: c (stops the compacton)
    x0: Optional[float] = None            # default: domain center
    snapshot_interval: float = 5.0
    newton_abs_tol: float = 1e-12
    newton_max_iters: int = 20
    blowup_threshold: Optional[float] = None
    discard_fraction: float = 0.25
    guard_nodes: int = 5
    backward_probe_fraction: float = 0.1
    threshold_fraction: float = 0.5
    out_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.c0 is None:
            object.__setattr__(self, "c0", float(self.c))
        if self.x0 is None:
            object.__setattr__(self, "x0", self.length / 2.0)
        if self.t_end < 0:
            raise ParameterError("t_end must be nonnegative")
        if self.snapshot_interval < 0:
            raise ParameterError("snapshot_interval must be nonnegative")
        # Constructing the component specs validates the remaining fields.
        self.grid()
        self.compacton()
        self.stepper()

    @property
    def dx(self) -> float:
        return self.length / self.num_nodes

    def grid(self) -> GridSpec:
        return GridSpec(self.length, self.num_nodes)

    def compacton(self) -> CompactonSpec:
        return CompactonSpec(self.p, self.c, self.x0, self.c0)

    def stepper(self) -> StepperConfig:
        return StepperConfig(self.rule, self.newton_abs_tol,
                             self.newton_max_iters, self.blowup_threshold)

    def timespec(self) -> TimeSpec:
        times = {0.0, float(self.t_end)}
        if self.snapshot_interval > 0:
            count = int(math.floor(self.t_end / self.snapshot_interval + 1e-9))
            times.update(k * self.snapshot_interval for k in range(count + 1))
        return TimeSpec(self.dt, self.t_end, tuple(sorted(times)))

    def analysis(self) -> AnalysisSettings:
        return AnalysisSettings(
            guard_nodes=self.guard_nodes,
            discard_fraction=self.discard_fraction,
            threshold_fraction=self.threshold_fraction,
            min_amplitude=100.0 * self.newton_abs_tol,
        )

    def with_spacing(self, dx: float) -> "ExperimentConfig":
        return replace(self, num_nodes=_nodes_from_spacing(self.length, dx))

    def with_timestep(self, dt: float) -> "ExperimentConfig":
        return replace(self, dt=dt)

    def with_scheme(self, scheme: Scheme) -> "ExperimentConfig":
        return replace(self, scheme=scheme)

    def with_drift(self, c0: float) -> "ExperimentConfig":
        return replace(self, c0=c0)

    def to_text(self) -> str:
        """Round-trippable key = value serialization of the resolved config."""
        lines = [
            f"scheme = {self.scheme.value}",
            f"rule = {self.rule.value}",
            f"p = {self.p}",
            f"c = {self.c!r}",
            f"c0 = {self.c0!r}",
            f"x0 = {self.x0!r}",
            f"L = {self.length!r}",
            f"M = {self.num_nodes}",
            f"dt = {self.dt!r}",
            f"t_end = {self.t_end!r}",
            f"snapshot_interval = {self.snapshot_interval!r}",
            f"newton_abs_tol = {self.newton_abs_tol!r}",
            f"newton_max_iters = {self.newton_max_iters}",
            f"discard_fraction = {self.discard_fraction!r}",
            f"guard_nodes = {self.guard_nodes}",
            f"backward_probe_fraction = {self.backward_probe_fraction!r}",
            f"threshold_fraction = {self.threshold_fraction!r}",
        ]
        if self.blowup_threshold is not None:
            lines.append(f"blowup_threshold = {self.blowup_threshold!r}")
        if self.out_dir is not None:
            lines.append(f"out_dir = {self.out_dir}")
        return "\n".join(lines) + "\n"


def _nodes_from_spacing(length: float, dx: float) -> int:
    if dx <= 0:
        raise ParameterError(f"dx must be positive, got {dx}")
    nodes = round(length / dx)
    if nodes < 1 or abs(nodes * dx - length) > 1e-6 * length:
        raise ParameterError(
            f"L/dx = {length / dx:.6g} is not an integer node count")
    return int(nodes)


_FLOAT_KEYS = {"c", "c0", "x0", "L", "dx", "dt", "t_end", "snapshot_interval",
               "newton_abs_tol", "blowup_threshold", "discard_fraction",
               "backward_probe_fraction", "threshold_fraction"}
_INT_KEYS = {"M", "newton_max_iters", "guard_nodes"}
_STR_KEYS = {"scheme", "rule", "p", "out_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate config text; errors carry the offending key and line."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigParseError(
                f"line {lineno}: expected 'key = value', got {stripped!r}",
                line=lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigParseError(f"line {lineno}: unknown key {key!r}",
                                   key=key, line=lineno)
        if key in raw:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}",
                                   key=key, line=lineno)
        if not value:
            raise ConfigParseError(f"line {lineno}: empty value for {key!r}",
                                   key=key, line=lineno)
        raw[key] = (value, lineno)

    missing = [key for key in _REQUIRED if key not in raw]
    if "dx" not in raw and "M" not in raw:
        missing.append("dx or M")
    if missing:
        raise ConfigParseError("missing required keys: " + ", ".join(missing))
    if "dx" in raw and "M" in raw:
        raise ConfigParseError("give either dx or M, not both", key="dx",
                               line=raw["dx"][1])

    def take(key, converter, default=None):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return converter(value)
        except (ValueError, KompaktonError) as exc:
            raise ConfigParseError(f"line {lineno}: bad value for {key!r}: {exc}",
                                   key=key, line=lineno) from exc

    length = take("L", float)
    if "M" in raw:
        num_nodes = take("M", int)
    else:
        dx = take("dx", float)
        try:
            num_nodes = _nodes_from_spacing(length, dx)
        except ParameterError as exc:
            raise ConfigParseError(f"line {raw['dx'][1]}: {exc}", key="dx",
                                   line=raw["dx"][1]) from exc

    kwargs = dict(
        scheme=take("scheme", Scheme.from_name),
        p=take("p", as_fraction),
        c=take("c", float),
        length=length,
        num_nodes=num_nodes,
        dt=take("dt", float),
        t_end=take("t_end", float),
        rule=take("rule", TimeRule.from_name, TimeRule.MIDPOINT),
        c0=take("c0", float),
        x0=take("x0", float),
        snapshot_interval=take("snapshot_interval", float, 5.0),
        newton_abs_tol=take("newton_abs_tol", float, 1e-12),
        newton_max_iters=take("newton_max_iters", int, 20),
        blowup_threshold=take("blowup_threshold", float),
        discard_fraction=take("discard_fraction", float, 0.25),
        guard_nodes=take("guard_nodes", int, 5),
        backward_probe_fraction=take("backward_probe_fraction", float, 0.1),
        threshold_fraction=take("threshold_fraction", float, 0.5),
        out_dir=take("out_dir", str),
    )
    try:
        return ExperimentConfig(**kwargs)
    except KompaktonError as exc:
        raise ConfigParseError(f"invalid configuration: {exc}") from exc
