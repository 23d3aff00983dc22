"""
INI-style run configuration.

Sections and keys (unknown keys are rejected)::

    [grid]          N, L
    [params]        sigma, gravity, delta, eps_visc, dt, T, dealias, cfl,
                    output_every, blowup_ceiling, N_extra
    [initial_data]  kind = flat|wave|crest|checkpoint, A, k, nu, eta, alpha0,
                    path, mollify_eps
    [outputs]       dir, energy_csv, checkpoints
    [study]         eps, deltas, steps, ref_steps, lam, workers

Command-line overrides use ``--section.key=value``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


def _float(text: str) -> float:
    s = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([0-9.eE+-]*)\*?pi", s)
    if m:
        pre = m.group(1)
        return (float(pre) if pre not in ("", "+") else 1.0) * math.pi
    return float(s)


def _int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text}")
    return int(v)


def _bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _dt(text: str):
    return "auto" if text.strip().lower() == "auto" else _float(text)


def _floats(text: str) -> tuple:
    return tuple(_float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _ints(text: str) -> tuple:
    return tuple(_int(x) for x in text.replace(";", ",").split(",") if x.strip())


SCHEMA = {
    "grid": {"N": _int, "L": _float},
    "params": {
        "sigma": _float, "gravity": _int, "delta": _float, "eps_visc": _float,
        "dt": _dt, "T": _float, "dealias": _float, "cfl": _float,
        "output_every": _int, "blowup_ceiling": _float, "N_extra": _int,
    },
    "initial_data": {
        "kind": str.strip, "A": _float, "k": _int, "nu": _float, "eta": _float,
        "alpha0": _float, "path": str.strip, "mollify_eps": _float,
    },
    "outputs": {"dir": str.strip, "energy_csv": _bool, "checkpoints": _bool},
    "study": {
        "eps": _floats, "deltas": _floats, "steps": _ints, "ref_steps": _int,
        "lam": _int, "workers": _int,
    },
}

DEFAULTS = {
    "grid": {"N": 256, "L": 2 * math.pi},
    "params": {
        "sigma": 0.0, "gravity": 1, "delta": 0.0, "eps_visc": 0.0, "dt": "auto",
        "T": 0.0, "dealias": 2.0 / 3.0, "cfl": 0.5, "output_every": 1,
        "blowup_ceiling": 1e6, "N_extra": 0,
    },
    "initial_data": {"kind": "flat", "alpha0": 0.0, "mollify_eps": 0.0},
    "outputs": {"dir": "out", "energy_csv": True, "checkpoints": True},
    "study": {
        "eps": (0.04, 0.02, 0.01, 0.005), "deltas": (0.08, 0.04, 0.02),
        "steps": (10, 20, 40, 80), "ref_steps": 640, "lam": 2, "workers": 1,
    },
}

REQUIRED_BY_KIND = {
    "flat": (),
    "wave": ("A", "k"),
    "crest": ("nu", "eta"),
    "checkpoint": ("path",),
}


@dataclass
class Config:
    grid: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    initial_data: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    study: dict = field(default_factory=dict)
    source: str = ""

    def section(self, name: str) -> dict:
        return getattr(self, name)


def _convert(section: str, key: str, raw: str):
    if section not in SCHEMA:
        raise ConfigError(f"unknown section [{section}]")
    conv = SCHEMA[section].get(key)
    if conv is None:
        raise ConfigError(f"unknown key {section}.{key}")
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from None


def parse_override(text: str):
    """``--section.key=value`` -> ``(section, key, raw)``."""
    m = re.fullmatch(r"--([A-Za-z_]+)\.([A-Za-z_0-9]+)=(.*)", text)
    if not m:
        raise ConfigError(f"malformed override {text!r}; expected --section.key=value")
    return m.group(1), m.group(2), m.group(3)


def load_config(path=None, overrides=(), text: str | None = None) -> Config:
    """Read a config file (or ``text``), apply overrides, fill defaults, validate."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    source = ""
    try:
        if text is not None:
            cp.read_string(text)
            source = "<string>"
        elif path is not None:
            p = Path(path)
            if not p.is_file():
                raise ConfigError(f"config file not found: {p}")
            cp.read(p)
            source = str(p)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None

    values = {s: {} for s in SCHEMA}
    for section in cp.sections():
        for key, raw in cp.items(section):
            values.setdefault(section, {})
            values[section][key] = _convert(section, key, raw)
    for ov in overrides:
        section, key, raw = parse_override(ov)
        values.setdefault(section, {})
        values[section][key] = _convert(section, key, raw)

    cfg = Config(source=source)
    for section in SCHEMA:
        merged = dict(DEFAULTS[section])
        merged.update(values.get(section, {}))
        setattr(cfg, section, merged)
    validate_config(cfg)
    return cfg


def validate_config(cfg: Config) -> None:
    g, p, ini = cfg.grid, cfg.params, cfg.initial_data
    N = g["N"]
    if N < 16 or N & (N - 1):
        raise ConfigError(f"grid.N must be a power of two >= 16, got {N}")
    if not g["L"] > 0:
        raise ConfigError("grid.L must be positive")
    for key in ("sigma", "delta", "eps_visc", "T", "blowup_ceiling"):
        if p[key] < 0:
            raise ConfigError(f"params.{key} must be >= 0")
    if p["gravity"] not in (0, 1):
        raise ConfigError("params.gravity must be 0 or 1")
    if p["dt"] != "auto" and not p["dt"] > 0:
        raise ConfigError("params.dt must be positive or auto")
    if not (0 < p["dealias"] <= 1):
        raise ConfigError("params.dealias must lie in (0, 1]")
    if not p["cfl"] > 0:
        raise ConfigError("params.cfl must be positive")
    if p["output_every"] < 1:
        raise ConfigError("params.output_every must be >= 1")
    if p["N_extra"] < 0:
        raise ConfigError("params.N_extra must be >= 0")
    kind = ini["kind"]
    if kind not in REQUIRED_BY_KIND:
        raise ConfigError(f"initial_data.kind must be one of {sorted(REQUIRED_BY_KIND)}, got {kind!r}")
    for key in REQUIRED_BY_KIND[kind]:
        if key not in ini:
            raise ConfigError(f"missing field initial_data.{key} (required for kind={kind})")
    if kind == "crest":
        if not (0 < ini["nu"] < 0.5):
            raise ConfigError("initial_data.nu must lie in (0, 1/2)")
        if ini["eta"] < 0:
            raise ConfigError("initial_data.eta must be >= 0")
    if kind == "wave" and ini["k"] < 1:
        raise ConfigError("initial_data.k must be >= 1")
    if ini["mollify_eps"] < 0:
        raise ConfigError("initial_data.mollify_eps must be >= 0")
    st = cfg.study
    if st["lam"] < 1:
        raise ConfigError("study.lam must be >= 1")
    if st["workers"] < 1:
        raise ConfigError("study.workers must be >= 1")
    if any(x <= 0 for x in st["eps"]) or any(x <= 0 for x in st["deltas"]):
        raise ConfigError("study sweep values must be positive")
    if any(n < 1 for n in st["steps"]) or st["ref_steps"] < 1:
        raise ConfigError("study step counts must be >= 1")
