"""Scenario configuration files (JSON) for the command-line front end.

Times are dimensionless: with rates Gamma_1 = Gamma_2 = 1 the grid is in
units of 1/Gamma.  Example::

    {
      "state": {"preset": "fragile-bell"},
      "channels": {"active": ["A", "B"], "gamma1": 1.0, "gamma2": 0.0},
      "time": {"t_start": 0, "t_end": 10, "n_points": 101, "spacing": "linear"},
      "mc": {"n_trajectories": 100000, "seed": 7},
      "outputs": ["negativity", "coherence"]
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import SOURCES, ChannelSpec
from .errors import ConfigError, DomainError, NormalizationError
from .linalg import JOINT_DIM, NORM_TOL

# 1-based supports of the named states; amplitudes default to equal magnitude.
PRESETS = {
    "fragile-bell": (1, 5, 9),
    "maximally-entangled": (1, 5, 9),
    "phi1": (1, 5),
    "phi2": (1, 9),
    "phi3": (5, 9),
    "robust-psi1": (2, 4),
    "robust-psi2": (3, 7),
    "robust-psi3": (6, 8),
}

OUTPUTS = ("negativity", "coherence", "reduced", "rho", "timescales", "classify", "dfs", "oracle")
SPACINGS = ("linear", "log")

# Log grids that start at zero get a leading 0 and then span this many decades.
LOG_DECADES = 3


class ValidationError(ConfigError):
    """Config parses but describes something unphysical or empty."""


@dataclass(frozen=True)
class StateConfig:
    preset: str | None = None
    amplitudes: tuple | None = None
    normalize: bool = False

    def vector(self) -> np.ndarray:
        if self.preset is not None:
            sup = PRESETS[self.preset]
            coeffs = (np.ones(len(sup), dtype=complex) if self.amplitudes is None
                      else np.asarray(self.amplitudes, dtype=complex))
            if len(coeffs) != len(sup):
                raise ValidationError(
                    f"state.amplitudes: preset {self.preset!r} takes {len(sup)} coefficients, got {len(coeffs)}")
            psi = np.zeros(JOINT_DIM, dtype=complex)
            psi[[k - 1 for k in sup]] = coeffs
            if self.amplitudes is None:
                psi /= np.linalg.norm(psi)
        else:
            psi = np.asarray(self.amplitudes, dtype=complex)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValidationError("state.amplitudes: zero vector")
        if self.normalize:
            return psi / norm
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(
                f"state.amplitudes: norm is {norm:.15g}, not 1 (set state.normalize to rescale)")
        return psi


@dataclass(frozen=True)
class ChannelConfig:
    active: tuple = ("A", "B")
    gamma1: float = 1.0
    gamma2: float = 1.0

    def spec(self) -> ChannelSpec:
        return ChannelSpec(frozenset(self.active), self.gamma1, self.gamma2)


@dataclass(frozen=True)
class TimeConfig:
    t_start: float = 0.0
    t_end: float = 10.0
    n_points: int = 101
    spacing: str = "linear"

    def grid(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.t_start, self.t_end, self.n_points)
        if self.t_start > 0:
            return np.geomspace(self.t_start, self.t_end, self.n_points)
        tail = np.geomspace(self.t_end * 10.0**-LOG_DECADES, self.t_end, self.n_points - 1)
        return np.concatenate([[0.0], tail])


@dataclass(frozen=True)
class MCConfig:
    n_trajectories: int = 100_000
    seed: int = 0
    times: tuple | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    state: StateConfig
    channels: ChannelConfig = field(default_factory=ChannelConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    mc: MCConfig = field(default_factory=MCConfig)
    outputs: tuple = ("negativity",)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        mc = MCConfig(self.mc.n_trajectories, seed, self.mc.times)
        return ScenarioConfig(self.state, self.channels, self.time, mc, self.outputs)

    def to_dict(self) -> dict:
        st: dict = {"normalize": self.state.normalize}
        if self.state.preset is not None:
            st["preset"] = self.state.preset
        if self.state.amplitudes is not None:
            st["amplitudes"] = [[c.real, c.imag] for c in self.state.amplitudes]
        return {
            "state": st,
            "channels": {"active": list(self.channels.active), "gamma1": self.channels.gamma1,
                         "gamma2": self.channels.gamma2},
            "time": {"t_start": self.time.t_start, "t_end": self.time.t_end,
                     "n_points": self.time.n_points, "spacing": self.time.spacing},
            "mc": {"n_trajectories": self.mc.n_trajectories, "seed": self.mc.seed,
                   "times": None if self.mc.times is None else list(self.mc.times)},
            "outputs": list(self.outputs),
        }


# --------------------------------------------------------------------------
# parsing


def _expect(obj, kind, where):
    if not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ConfigError(f"{where}: expected {names}, got {type(obj).__name__}")
    return obj


def _number(obj, where) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {obj!r}")
    if not np.isfinite(obj):
        raise ConfigError(f"{where}: must be finite")
    return float(obj)


def _integer(obj, where) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(f"{where}: expected an integer, got {obj!r}")
    return obj


def _complex(obj, where) -> complex:
    if isinstance(obj, str):
        try:
            return complex(obj.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"{where}: cannot parse {obj!r} as a complex number") from None
    if isinstance(obj, list):
        if len(obj) != 2:
            raise ConfigError(f"{where}: complex pairs must be [re, im]")
        return complex(_number(obj[0], f"{where}[0]"), _number(obj[1], f"{where}[1]"))
    return complex(_number(obj, where))


def _no_extra(d: dict, allowed, where):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _parse_state(raw) -> StateConfig:
    if isinstance(raw, str):
        raw = {"preset": raw}
    elif isinstance(raw, list):
        raw = {"amplitudes": raw}
    _expect(raw, dict, "state")
    _no_extra(raw, ("preset", "amplitudes", "normalize"), "state")
    preset = raw.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"state.preset: unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    amps = raw.get("amplitudes")
    if amps is not None:
        _expect(amps, list, "state.amplitudes")
        amps = tuple(_complex(a, f"state.amplitudes[{i}]") for i, a in enumerate(amps))
        if preset is None and len(amps) != JOINT_DIM:
            raise ConfigError(f"state.amplitudes: expected {JOINT_DIM} entries, got {len(amps)}")
    if preset is None and amps is None:
        raise ConfigError("state: give a preset or amplitudes")
    normalize = _expect(raw.get("normalize", False), bool, "state.normalize")
    return StateConfig(preset, amps, normalize)


def _parse_channels(raw) -> ChannelConfig:
    _expect(raw, dict, "channels")
    _no_extra(raw, ("active", "gamma1", "gamma2"), "channels")
    active = _expect(raw.get("active", ["A", "B"]), list, "channels.active")
    for i, s in enumerate(active):
        if s not in SOURCES:
            raise ConfigError(f"channels.active[{i}]: unknown source {s!r}; choose from {', '.join(SOURCES)}")
    g1 = _number(raw.get("gamma1", 1.0), "channels.gamma1")
    g2 = _number(raw.get("gamma2", 1.0), "channels.gamma2")
    for name, g in (("gamma1", g1), ("gamma2", g2)):
        if g < 0:
            raise ValidationError(f"channels.{name}: rate must be non-negative")
    return ChannelConfig(tuple(sorted(set(active), key=SOURCES.index)), g1, g2)


def _parse_time(raw) -> TimeConfig:
    _expect(raw, dict, "time")
    _no_extra(raw, ("t_start", "t_end", "n_points", "spacing"), "time")
    t0 = _number(raw.get("t_start", 0.0), "time.t_start")
    t1 = _number(raw.get("t_end", 10.0), "time.t_end")
    n = _integer(raw.get("n_points", 101), "time.n_points")
    spacing = raw.get("spacing", "linear")
    if spacing not in SPACINGS:
        raise ConfigError(f"time.spacing: expected one of {', '.join(SPACINGS)}, got {spacing!r}")
    if t0 < 0:
        raise ValidationError("time.t_start: must be >= 0")
    if not t1 > t0:
        raise ValidationError("time.t_end: must exceed time.t_start (empty time grid)")
    if n < 2:
        raise ValidationError("time.n_points: need at least 2 points")
    return TimeConfig(t0, t1, n, spacing)


def _parse_mc(raw) -> MCConfig:
    _expect(raw, dict, "mc")
    _no_extra(raw, ("n_trajectories", "seed", "times"), "mc")
    n = _integer(raw.get("n_trajectories", 100_000), "mc.n_trajectories")
    if n < 2:
        raise ValidationError("mc.n_trajectories: need at least 2 trajectories")
    seed = _integer(raw.get("seed", 0), "mc.seed")
    if seed < 0:
        raise ValidationError("mc.seed: must be non-negative")
    times = raw.get("times")
    if times is not None:
        _expect(times, list, "mc.times")
        times = tuple(_number(t, f"mc.times[{i}]") for i, t in enumerate(times))
        if any(t < 0 for t in times) or not times:
            raise ValidationError("mc.times: need one or more non-negative times")
    return MCConfig(n, seed, times)


def parse_config(raw) -> ScenarioConfig:
    _expect(raw, dict, "config")
    _no_extra(raw, ("state", "channels", "time", "mc", "outputs"), "config")
    if "state" not in raw:
        raise ConfigError("state: missing")
    outputs = _expect(raw.get("outputs", ["negativity"]), list, "outputs")
    for i, o in enumerate(outputs):
        if o not in OUTPUTS:
            raise ConfigError(f"outputs[{i}]: unknown output {o!r}; choose from {', '.join(OUTPUTS)}")
    cfg = ScenarioConfig(
        _parse_state(raw["state"]),
        _parse_channels(raw.get("channels", {})),
        _parse_time(raw.get("time", {})),
        _parse_mc(raw.get("mc", {})),
        tuple(dict.fromkeys(outputs)),
    )
    try:
        cfg.state.vector()
        cfg.channels.spec()
    except (NormalizationError, DomainError) as exc:
        raise ValidationError(str(exc)) from exc
    return cfg


def loads_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return loads_config(text, str(path))
