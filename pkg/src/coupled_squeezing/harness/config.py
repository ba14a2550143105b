"""Scenario configuration and its flat ``key = value`` text format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from ..errors import ConfigError

SCHEMES = ("full_dc", "full_dc_ac", "effective_oat", "effective_tat")
INTERACTIONS = ("H1", "H2", "H3", "custom")


@dataclass(frozen=True)
class ScenarioConfig:
    scheme: str = "effective_oat"
    interaction_preset: str = "H2"
    g: float = 1.0
    g_x: float | None = None
    g_y: float | None = None
    g_z: float | None = None
    h1_axis: str = "x"
    n_s: int = 20
    n_j: int = 20
    delta_over_g: float | None = 50.0
    omega: float | None = None
    init_s_theta: float | None = None
    init_s_phi: float | None = None
    init_j_theta: float = 0.0
    init_j_phi: float = 0.0
    t_end: float | None = None
    t_end_factor: float = 3.0
    n_samples: int = 200
    tol: float = 1e-8
    refine: bool = True
    epsilon: float = 0.0
    epsilon_prime: float = 0.0
    ac_frequency: float | None = None
    ac_frequency_factor: float = 20.0
    dense_limit: int = 600
    output_prefix: str = "run"
    # sweep inputs; ignored by single runs
    n_list: tuple = field(default=())
    vary: str = "epsilon"
    values: tuple = field(default=())
    delta_list: tuple = field(default=())

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.interaction_preset not in INTERACTIONS:
            raise ConfigError(f"interaction_preset must be one of {INTERACTIONS}, got {self.interaction_preset!r}")
        if self.interaction_preset == "custom" and None in (self.g_x, self.g_y, self.g_z):
            raise ConfigError("interaction_preset = custom needs g_x, g_y and g_z")
        if self.h1_axis not in ("x", "y", "z"):
            raise ConfigError(f"h1_axis must be x, y or z, got {self.h1_axis!r}")
        if self.n_s < 1 or self.n_j < 1:
            raise ConfigError("n_s and n_j must be positive")
        if self.omega is None and not (self.delta_over_g is not None and self.delta_over_g > 0):
            raise ConfigError("set delta_over_g > 0 or an explicit omega")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be at least 2")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.t_end is not None and not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if self.vary not in ("epsilon", "epsilon_prime"):
            raise ConfigError(f"vary must be epsilon or epsilon_prime, got {self.vary!r}")
        if (self.init_s_theta is None) != (self.init_s_phi is None):
            raise ConfigError("set both init_s_theta and init_s_phi, or neither")

    @property
    def is_full(self):
        return self.scheme.startswith("full")

    @property
    def is_tat(self):
        return self.scheme in ("full_dc_ac", "effective_tat")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None or (isinstance(value, tuple) and not value):
                continue
            lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


_FIELD_TYPES = {
    "scheme": str,
    "interaction_preset": str,
    "g": float,
    "g_x": float,
    "g_y": float,
    "g_z": float,
    "h1_axis": str,
    "n_s": int,
    "n_j": int,
    "delta_over_g": float,
    "omega": float,
    "init_s_theta": float,
    "init_s_phi": float,
    "init_j_theta": float,
    "init_j_phi": float,
    "t_end": float,
    "t_end_factor": float,
    "n_samples": int,
    "tol": float,
    "refine": bool,
    "epsilon": float,
    "epsilon_prime": float,
    "ac_frequency": float,
    "ac_frequency_factor": float,
    "dense_limit": int,
    "output_prefix": str,
    "n_list": (int,),
    "vary": str,
    "values": (float,),
    "delta_list": (float,),
}


def _parse_number(kind, key, text):
    try:
        if kind is int:
            number = float(text)
            if number != int(number):
                raise ValueError
            return int(number)
        if text.lower() in ("pi", "pi/2", "pi/4"):
            return {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4}[text.lower()]
        return float(text)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot read {text!r} as {kind.__name__}") from None


def _parse_value(key, text):
    kind = _FIELD_TYPES[key]
    if isinstance(kind, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        return tuple(_parse_number(kind[0], key, t) for t in items)
    if kind is bool:
        lowered = text.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ConfigError(f"key {key!r}: expected true/false, got {text!r}")
    if kind is str:
        return text
    if text.lower() in ("none", ""):
        return None
    return _parse_number(kind, key, text)


def parse_config_text(text, **overrides):
    """Build a :class:`ScenarioConfig` from ``key = value`` lines.

    ``#`` starts a comment; unknown or repeated keys raise
    :class:`ConfigError` naming the key.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"config key {key!r} given twice (line {lineno})")
        values[key] = _parse_value(key, value)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), **overrides)
