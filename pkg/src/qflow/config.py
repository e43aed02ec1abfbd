"""Run configuration: INI-style sections of key = value lines.

Sections and keys:

    [model]   dim, c, beta, gamma, and either alpha or the temperature
              form a_coef/theta/theta_star (alpha = a_coef*(theta-theta_star))
    [grid]    n, laplacian (fd_central | spectral, default fd_central)
    [time]    tau, t_end, monitor_every (default 1)
    [run]     scheme (LRI1a|LRI1b|LRI2a|LRI2b), ic (paper2d|paper3d|file:PATH)
    [output]  dir, snapshot_times (comma-separated, optional)

Validation failures carry the section.key path in the message.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .grid_field import PeriodicGrid
from .integrators import SchemeId
from .nonlinearity import ModelParams
from .semigroup import KINDS


class ConfigError(ValueError):
    """A configuration file is missing keys or breaks an invariant."""


@dataclass(frozen=True)
class TemperatureModel:
    a_coef: float
    theta: float
    theta_star: float

    def alpha(self, theta: float | None = None) -> float:
        t = self.theta if theta is None else theta
        return self.a_coef * (t - self.theta_star)


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    temperature: TemperatureModel | None
    grid: PeriodicGrid
    laplacian: str
    tau: float
    t_end: float
    monitor_every: int
    scheme: SchemeId
    ic: str
    out_dir: Path
    snapshot_times: tuple[float, ...]


_MISSING = object()


class _Reader:
    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def typed(self, section: str, key: str, cast, default=_MISSING):
        if not self.parser.has_option(section, key):
            if default is _MISSING:
                raise ConfigError(f"missing key {section}.{key}")
            return default
        text = self.parser.get(section, key)
        try:
            return cast(text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"{section}.{key}: cannot parse {text!r} as {cast.__name__}"
            ) from exc


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_float(text: str) -> float:
    return float(text.strip())


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    r = _Reader(parser)

    dim = r.typed("model", "dim", _parse_int)
    if dim not in (2, 3):
        raise ConfigError(f"model.dim: must be 2 or 3, got {dim}")
    c = r.typed("model", "c", _parse_float)
    if c <= 0.0:
        raise ConfigError(f"model.c: must be positive, got {c}")
    beta = r.typed("model", "beta", _parse_float)
    if beta < 0.0:
        raise ConfigError(f"model.beta: must be nonnegative, got {beta}")
    if dim == 2 and beta != 0.0:
        raise ConfigError(
            "model.beta: must be 0 when model.dim = 2 "
            "(the quadratic term of the force vanishes identically in 2D)"
        )
    gamma = r.typed("model", "gamma", _parse_float)
    if gamma <= 0.0:
        raise ConfigError(f"model.gamma: must be positive, got {gamma}")

    has_alpha = r.has("model", "alpha")
    has_temp = any(r.has("model", k) for k in ("a_coef", "theta", "theta_star"))
    if has_alpha and has_temp:
        raise ConfigError(
            "model.alpha and model.a_coef/theta/theta_star are mutually exclusive"
        )
    if has_alpha:
        alpha = r.typed("model", "alpha", _parse_float)
        temperature = None
    elif has_temp:
        temperature = TemperatureModel(
            a_coef=r.typed("model", "a_coef", _parse_float),
            theta=r.typed("model", "theta", _parse_float),
            theta_star=r.typed("model", "theta_star", _parse_float),
        )
        if temperature.a_coef <= 0.0:
            raise ConfigError(
                f"model.a_coef: must be positive, got {temperature.a_coef}"
            )
        alpha = temperature.alpha()
    else:
        raise ConfigError(
            "missing key model.alpha (or the temperature form model.a_coef, "
            "model.theta, model.theta_star)"
        )
    try:
        params = ModelParams(c=c, alpha=alpha, beta=beta, gamma=gamma, dim=dim)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc

    n = r.typed("grid", "n", _parse_int)
    if n < 4:
        raise ConfigError(f"grid.n: must be at least 4, got {n}")
    laplacian = r.typed("grid", "laplacian", str.strip, default="fd_central")
    if laplacian not in KINDS:
        raise ConfigError(f"grid.laplacian: must be one of {KINDS}, got {laplacian!r}")
    grid = PeriodicGrid(dim=dim, n=n)

    tau = r.typed("time", "tau", _parse_float)
    if tau <= 0.0:
        raise ConfigError(f"time.tau: must be positive, got {tau}")
    t_end = r.typed("time", "t_end", _parse_float)
    if t_end < 0.0:
        raise ConfigError(f"time.t_end: must be nonnegative, got {t_end}")
    monitor_every = r.typed("time", "monitor_every", _parse_int, default=1)
    if monitor_every < 1:
        raise ConfigError(f"time.monitor_every: must be >= 1, got {monitor_every}")

    scheme_text = r.typed("run", "scheme", str.strip)
    try:
        scheme = SchemeId(scheme_text)
    except ValueError:
        raise ConfigError(
            f"run.scheme: must be one of {[s.value for s in SchemeId]}, "
            f"got {scheme_text!r}"
        ) from None
    ic = r.typed("run", "ic", str.strip)
    if ic == "paper2d" and dim != 2:
        raise ConfigError("run.ic: paper2d requires model.dim = 2")
    if ic == "paper3d" and dim != 3:
        raise ConfigError("run.ic: paper3d requires model.dim = 3")
    if ic not in ("paper2d", "paper3d") and not ic.startswith("file:"):
        raise ConfigError(
            f"run.ic: must be paper2d, paper3d, or file:PATH, got {ic!r}"
        )

    out_dir = Path(r.typed("output", "dir", str.strip, default="out"))
    snap_text = r.typed("output", "snapshot_times", str.strip, default="")
    snapshot_times: list[float] = []
    if snap_text:
        for item in snap_text.split(","):
            try:
                t_snap = float(item.strip())
            except ValueError:
                raise ConfigError(
                    f"output.snapshot_times: cannot parse {item.strip()!r} as float"
                ) from None
            k = round(t_snap / tau) if t_snap > 0.0 else 0
            if t_snap < 0.0 or abs(k * tau - t_snap) > 1e-12 or t_snap > t_end:
                raise ConfigError(
                    f"output.snapshot_times: {t_snap} is not a step multiple of "
                    f"time.tau within [0, t_end]"
                )
            snapshot_times.append(t_snap)

    return RunConfig(
        params=params,
        temperature=temperature,
        grid=grid,
        laplacian=laplacian,
        tau=tau,
        t_end=t_end,
        monitor_every=monitor_every,
        scheme=scheme,
        ic=ic,
        out_dir=out_dir,
        snapshot_times=tuple(snapshot_times),
    )
