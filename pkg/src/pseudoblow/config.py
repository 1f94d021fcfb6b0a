"""Flat ``[section] key = value`` run configuration with typed defaults."""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass

from .solver import ProblemSpec, RadialGrid, RadialProfile, RunControl
from .sweep import SweepConfig

ENV_CONFIG = "PSEUDOBLOW_CONFIG"


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> tuple:
    parts = [x for x in text.replace(",", " ").split() if x]
    return tuple(float(x) for x in parts)


_TYPE_NAMES = {float: "float", int: "int", str: "string", _bool: "bool", _float_list: "list of floats"}

# section -> key -> (parser, default)
SCHEMA = {
    "problem": {
        "ndim": (int, 3),
        "k": (float, 1.0),
        "p": (float, 2.0),
        "gamma": (float, 0.0),
        "nonlinear": (_bool, True),
        "omega_kind": (str, "gaussian"),
        "omega_amp": (float, 0.1),
        "omega_width": (float, 1.0),
        "omega_coef": (float, 0.0),
        "u0_kind": (str, "zero"),
        "u0_amp": (float, 0.0),
        "u0_width": (float, 1.0),
        "u0_coef": (float, 0.0),
    },
    "grid": {
        "r_max": (float, 16.0),
        "n_r": (int, 161),
        "bc": (str, "neumann"),
    },
    "time": {
        "dt0": (float, 0.01),
        "horizon": (float, 1.0),
        "adaptive": (_bool, True),
        "growth_limit": (float, 1.1),
        "adapt_floor": (float, 1.0),
        "dt_min": (float, 1e-12),
        "record_every": (int, 1),
        "max_steps": (int, 10_000_000),
    },
    "blowup": {
        "threshold": (float, 1e8),
    },
    "sweep": {
        "p_list": (_float_list, (2.0, 3.0, 6.0)),
        "gamma_list": (_float_list, (0.0, 0.5)),
        "k_list": (_float_list, (1.0,)),
    },
    "output": {
        "directory": (str, "out"),
        "prefix": (str, "run"),
    },
}


class ConfigError(ValueError):
    pass


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration: every key in :data:`SCHEMA` has a value."""

    values: dict

    def get(self, section: str, key: str):
        return self.values[section][key]

    def serialize(self) -> str:
        lines = []
        for section, keys in SCHEMA.items():
            lines.append(f"[{section}]")
            for key in keys:
                lines.append(f"{key} = {_format(self.values[section][key])}")
            lines.append("")
        return "\n".join(lines)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def header_lines(self) -> list[str]:
        return [f"config_sha256 = {self.sha256}"] + [ln for ln in self.serialize().splitlines() if ln]

    def header_dict(self) -> dict:
        return {"config_sha256": self.sha256,
                "config": {s: {k: _format(v) for k, v in kv.items()} for s, kv in self.values.items()}}

    # -- builders --------------------------------------------------------

    def _profile(self, prefix: str) -> RadialProfile:
        g = self.values["problem"]
        return RadialProfile(g[f"{prefix}_kind"], g[f"{prefix}_amp"], g[f"{prefix}_width"],
                             g[f"{prefix}_coef"])

    def problem(self) -> ProblemSpec:
        g = self.values["problem"]
        return ProblemSpec(k=g["k"], p=g["p"], gamma=g["gamma"], omega=self._profile("omega"),
                           u0=self._profile("u0"), nonlinear=g["nonlinear"])

    def grid(self) -> RadialGrid:
        g = self.values["grid"]
        return RadialGrid(self.values["problem"]["ndim"], g["r_max"], g["n_r"], g["bc"])

    def control(self, store_profiles: bool = False) -> RunControl:
        t = self.values["time"]
        return RunControl(dt0=t["dt0"], horizon=t["horizon"],
                          threshold=self.values["blowup"]["threshold"], adaptive=t["adaptive"],
                          growth_limit=t["growth_limit"], adapt_floor=t["adapt_floor"],
                          dt_min=t["dt_min"], record_every=t["record_every"],
                          store_profiles=store_profiles, max_steps=t["max_steps"])

    def sweep(self) -> SweepConfig:
        pr, g, t, s = (self.values[x] for x in ("problem", "grid", "time", "sweep"))
        if pr["omega_kind"] != "gaussian":
            raise ConfigError("[problem] omega_kind: sweeps use the gaussian forcing family")
        return SweepConfig(p=s["p_list"], gamma=s["gamma_list"], k=s["k_list"], ndim=pr["ndim"],
                           omega_amp=pr["omega_amp"], omega_width=pr["omega_width"],
                           r_max=g["r_max"], n_r=g["n_r"], bc=g["bc"], dt0=t["dt0"],
                           horizon=t["horizon"], threshold=self.values["blowup"]["threshold"],
                           growth_limit=t["growth_limit"], adapt_floor=t["adapt_floor"],
                           dt_min=t["dt_min"])

    def validate(self, sweep: bool = False) -> None:
        """Build every object once so range errors surface before any run."""
        try:
            if sweep:
                self.sweep()
            else:
                self.problem()
                self.grid()
                self.control()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def defaults() -> RunConfig:
    return RunConfig({s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()})


def parse_text(text: str, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values = defaults().values
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key [{section}] {key}")
            conv, _ = SCHEMA[section][key]
            try:
                val = conv(raw.strip())
            except ValueError:
                raise ConfigError(
                    f"{source}: [{section}] {key}: expected {_TYPE_NAMES[conv]}, got {raw.strip()!r}"
                ) from None
            if isinstance(val, float) and not math.isfinite(val):
                raise ConfigError(f"{source}: [{section}] {key}: value must be finite")
            values[section][key] = val
    return RunConfig(values)


def load(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_text(text, source=str(path))

