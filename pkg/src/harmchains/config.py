"""
Run configuration files.

INI-style text with four sections, one key per line::

    [model]
    lambda = 4, 1
    q = 1

    [geometry]
    n_x = 64
    n_y = 1024

    [block]
    l_x = 8
    l_y = 16
    placement = centered

    [run]
    mode = strict
    grid = lx=2,4,8;ly=16,32,64

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError
from .model import MODES, STRICT, BlockSpec, ChainCouplings, Geometry, Placement
from .spectral import DEFAULT_QUADRATURE_POINTS

_SCHEMA = {
    "model": {"lambda": True, "q": True},
    "geometry": {"n_x": True, "n_y": True},
    "block": {"l_x": False, "l_y": False, "placement": False},
    "run": {"mode": False, "grid": False, "tolerance": False, "quadrature_points": False,
            "workers": False, "out": False},
}


@dataclass(frozen=True)
class RunConfig:
    couplings: ChainCouplings
    geometry: Geometry
    l_x: Optional[int] = None
    l_y: Optional[int] = None
    placement: Placement = Placement()
    mode: str = STRICT
    grid: Optional[str] = None
    tolerance: float = 1e-8
    quadrature_points: int = DEFAULT_QUADRATURE_POINTS
    workers: int = 1
    out: Optional[str] = None

    @property
    def block(self) -> BlockSpec:
        if self.l_x is None or self.l_y is None:
            raise ConfigError("config has no [block] l_x / l_y")
        return BlockSpec(self.l_x, self.l_y, self.placement)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _floats(text: str, key: str) -> list[float]:
    try:
        values = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{key}: no coefficients given")
    return values


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
    for section, keys in _SCHEMA.items():
        for key, required in keys.items():
            if required and not parser.has_option(section, key):
                raise ConfigError(f"missing required key {key!r} in [{section}]")

    def get(section, key):
        return parser.get(section, key, fallback=None)

    try:
        couplings = ChainCouplings(_floats(get("model", "lambda"), "lambda"), _floats(get("model", "q"), "q"))
        geometry = Geometry(_int(get("geometry", "n_x"), "n_x"), _int(get("geometry", "n_y"), "n_y"))
        placement = Placement.parse(get("block", "placement") or "centered")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    mode = get("run", "mode") or STRICT
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    l_x, l_y = get("block", "l_x"), get("block", "l_y")
    tol, quad, workers = get("run", "tolerance"), get("run", "quadrature_points"), get("run", "workers")
    try:
        tolerance = float(tol) if tol else 1e-8
    except ValueError:
        raise ConfigError(f"tolerance: expected a number, got {tol!r}") from None
    return RunConfig(
        couplings=couplings,
        geometry=geometry,
        l_x=_int(l_x, "l_x") if l_x else None,
        l_y=_int(l_y, "l_y") if l_y else None,
        placement=placement,
        mode=mode,
        grid=get("run", "grid"),
        tolerance=tolerance,
        quadrature_points=_int(quad, "quadrature_points") if quad else DEFAULT_QUADRATURE_POINTS,
        workers=_int(workers, "workers") if workers else 1,
        out=get("run", "out"),
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
