"""Experiment configuration: INI-style sections, strict validation.

Every solver-facing default lives here; a config file overrides fields
selectively.  Parse failures carry the file line when it can be located.
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .exponents import ExponentSet, build_exponent_set
from .grid import DomainGrid
from .solvers import SolverOptions, SubBox

__all__ = ["ExperimentConfig", "load_config"]


@dataclass
class ExperimentConfig:
    dim: int = 3
    res: tuple[int, ...] = (16, 16, 16)
    extent: tuple[float, ...] = (1.0, 1.0, 1.0)

    p1: str = "2"
    p2: str = "2 + 0.5*sin(pi*x1)"
    q: str = "4"

    lam: float | None = None  # None = auto (2*lambda_star for solve-min, 1.0 for solve-mp)
    lam_grid_lo: float = 1e-2
    lam_grid_hi: float = 1e4
    lam_grid_count: int = 361

    t0: float = 2.0
    bump_center: tuple[float, ...] = (0.5, 0.5, 0.5)
    bump_side: float = 0.5

    path_points: int = 40
    seed_centers: tuple[tuple[float, ...], ...] = ((0.3, 0.3, 0.3), (0.7, 0.7, 0.7))
    seed_side: float = 0.25
    seed_t0: float = 2.0

    tol: float = 1e-6
    max_iter: int = 5000

    seed: int = 0
    out_dir: str = "out"
    override_hypotheses: bool = False

    def grid(self) -> DomainGrid:
        return DomainGrid(self.dim, self.res, self.extent)

    def exponents(self) -> ExponentSet:
        return build_exponent_set(self.p1, self.p2, self.q, self.grid())

    def solver_options(self) -> SolverOptions:
        return SolverOptions(tol=self.tol, max_iter=self.max_iter)

    def lam_grid(self) -> np.ndarray:
        return np.geomspace(self.lam_grid_lo, self.lam_grid_hi, self.lam_grid_count)

    def bump_box(self) -> SubBox:
        return SubBox.centered(self.bump_center, self.bump_side)

    def seed_boxes(self) -> list[SubBox]:
        return [SubBox.centered(c, self.seed_side) for c in self.seed_centers]

    def echo(self) -> dict:
        d = asdict(self)
        d["res"] = list(self.res)
        d["extent"] = list(self.extent)
        d["bump_center"] = list(self.bump_center)
        d["seed_centers"] = [list(c) for c in self.seed_centers]
        return d


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _line_of(path: Path, section: str, key: str) -> str:
    """Best-effort line locator for diagnostics."""
    try:
        lines = path.read_text().splitlines()
    except OSError:
        return ""
    in_section = False
    for i, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped == f"[{section}]"
        elif in_section and stripped.split("=")[0].strip() == key:
            return f"{path}:{i}: "
    return f"{path}: "


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read an INI config; missing file fields keep their defaults."""
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    def take(section, key, conv, setter):
        if parser.has_option(section, key):
            raw = parser.get(section, key)
            try:
                setter(conv(raw))
            except ConfigError:
                raise
            except Exception as exc:
                raise ConfigError(
                    f"{_line_of(path, section, key)}bad value for [{section}] {key}: {raw!r} ({exc})"
                ) from None

    def setattr_(name):
        return lambda v: setattr(cfg, name, v)

    take("grid", "dim", int, setattr_("dim"))
    # dim-dependent defaults adapt unless the file overrides them
    if not parser.has_option("grid", "res"):
        cfg.res = (16,) * cfg.dim
    if not parser.has_option("grid", "extent"):
        cfg.extent = (1.0,) * cfg.dim
    if not parser.has_option("bump", "center"):
        cfg.bump_center = (0.5,) * cfg.dim
    if not parser.has_option("mountain", "seed_centers"):
        cfg.seed_centers = ((0.3,) * cfg.dim, (0.7,) * cfg.dim)
    take("grid", "res", _ints, lambda v: setattr(cfg, "res", v if len(v) > 1 else v * cfg.dim))
    take("grid", "extent", _floats, lambda v: setattr(cfg, "extent", v if len(v) > 1 else v * cfg.dim))
    for key, value in (("res", cfg.res), ("extent", cfg.extent)):
        if len(value) != cfg.dim:
            raise ConfigError(
                f"{_line_of(path, 'grid', key)}{key} has {len(value)} entries for dim {cfg.dim}"
            )

    take("exponents", "p1", str, setattr_("p1"))
    take("exponents", "p2", str, setattr_("p2"))
    take("exponents", "q", str, setattr_("q"))

    def parse_lam(raw):
        raw = raw.strip()
        if raw.lower() == "auto":
            return None
        value = float(raw)
        if value <= 0.0:
            raise ValueError("lambda must be positive")
        return value

    take("problem", "lambda", parse_lam, setattr_("lam"))
    take("problem", "lambda_grid", _floats, lambda v: _set_lam_grid(cfg, v))

    take("bump", "t0", float, setattr_("t0"))
    take("bump", "center", _floats, setattr_("bump_center"))
    take("bump", "side", float, setattr_("bump_side"))

    take("mountain", "path_points", int, setattr_("path_points"))
    take(
        "mountain", "seed_centers",
        lambda raw: tuple(_floats(part) for part in raw.split("|") if part.strip()),
        setattr_("seed_centers"),
    )
    take("mountain", "seed_side", float, setattr_("seed_side"))
    take("mountain", "seed_t0", float, setattr_("seed_t0"))

    take("solver", "tol", float, setattr_("tol"))
    take("solver", "max_iter", int, setattr_("max_iter"))

    take("sampling", "seed", int, setattr_("seed"))
    take("output", "dir", str, setattr_("out_dir"))

    # eager validation so bad expressions fail at load time with a location
    for key in ("p1", "p2", "q"):
        try:
            from .fieldexpr import parse_field_expression

            parse_field_expression(getattr(cfg, key), cfg.dim)
        except ConfigError as exc:
            raise ConfigError(f"{_line_of(path, 'exponents', key)}{exc}") from None
    try:
        cfg.grid()
    except Exception as exc:
        raise ConfigError(f"{path}: invalid grid: {exc}") from None
    return cfg


def _set_lam_grid(cfg: ExperimentConfig, v):
    if len(v) != 3:
        raise ValueError("lambda_grid wants: lo hi count")
    cfg.lam_grid_lo, cfg.lam_grid_hi, cfg.lam_grid_count = v[0], v[1], int(v[2])
    if cfg.lam_grid_lo <= 0 or cfg.lam_grid_hi <= cfg.lam_grid_lo or cfg.lam_grid_count < 2:
        raise ValueError("lambda_grid needs 0 < lo < hi and count >= 2")
