"""Variable-exponent Lebesgue machinery on the cell measure space.

Modulars integrate the cell-averaged absolute value, so the norm-modular
relations and the Hoelder pairing hold exactly in the discrete model (up to
roundoff), not just asymptotically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormBracketError
from .exponents import ExponentField, conjugate_exponent
from .grid import DomainGrid, GridFunction, cell_quadrature, discrete_gradient, node_to_cell

__all__ = [
    "NORM_TOL",
    "NormSolveTrace",
    "modular",
    "modular_cells",
    "luxemburg_norm",
    "luxemburg_norm_cells",
    "sobolev_norm",
    "check_holder",
    "check_modular_norm_relations",
    "check_inclusion_bound",
]

# asserted bound on the root residual |rho(u/mu) - 1|; bisection actually
# runs the bracket down to rounding, so the realized residual is ~1e-15
NORM_TOL = 1e-10
_MAX_BISECT = 200
_BRACKET_SPAN = 2.0**60
_EXPAND_LIMIT = 3

_REL_SLACK = 1e-12


@dataclass
class NormSolveTrace:
    root: float
    bracket_lo: float
    bracket_hi: float
    iterations: int
    residual: float


def modular_cells(grid: DomainGrid, w: np.ndarray, p: ExponentField) -> float:
    """Integral of |w|^p over the cells."""
    with np.errstate(over="ignore"):
        return cell_quadrature(grid, np.abs(w) ** p.values)


def modular(u: GridFunction, p: ExponentField) -> float:
    """Integral of the cell-averaged |u| raised to the cell exponent."""
    return modular_cells(u.grid, node_to_cell(u), p)


def luxemburg_norm_cells(
    grid: DomainGrid, w: np.ndarray, p: ExponentField
) -> tuple[float, NormSolveTrace]:
    """Smallest mu > 0 with modular(w/mu) <= 1, by geometric bisection.

    The scaled modular is continuous and strictly decreasing in mu for w != 0,
    so the root with modular = 1 is unique; w == 0 returns 0 by convention.
    """
    absw = np.abs(np.asarray(w, dtype=float))
    scale = float(absw.max())
    if scale == 0.0:
        return 0.0, NormSolveTrace(0.0, 0.0, 0.0, 0, 0.0)

    pv = p.values

    def rho(mu: float) -> float:
        with np.errstate(over="ignore"):
            return grid.cell_volume * float(np.sum((absw / mu) ** pv))

    lo = scale / _BRACKET_SPAN
    hi = scale * _BRACKET_SPAN
    for _ in range(_EXPAND_LIMIT):
        if rho(lo) >= 1.0 and rho(hi) <= 1.0:
            break
        lo /= _BRACKET_SPAN
        hi *= _BRACKET_SPAN
    else:
        raise NormBracketError(
            f"could not bracket the norm root (scale {scale:.3e})"
        )
    bracket = (lo, hi)

    mid = np.sqrt(lo * hi)
    res = abs(rho(mid) - 1.0)
    iters = 0
    for iters in range(1, _MAX_BISECT + 1):
        mid = np.sqrt(lo * hi)
        r = rho(mid)
        res = abs(r - 1.0)
        if res == 0.0:
            break
        if r > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * mid:
            break
    # settle on the better endpoint of the final bracket
    for cand in (lo, hi):
        rc = abs(rho(cand) - 1.0)
        if rc < res:
            mid, res = cand, rc
    if res > NORM_TOL:
        raise NormBracketError(
            f"norm root residual {res:.3e} exceeds {NORM_TOL} after {iters} iterations"
        )
    return float(mid), NormSolveTrace(float(mid), bracket[0], bracket[1], iters, res)


def luxemburg_norm(u: GridFunction, p: ExponentField) -> tuple[float, NormSolveTrace]:
    return luxemburg_norm_cells(u.grid, node_to_cell(u), p)


def sobolev_norm(u: GridFunction, p: ExponentField) -> float:
    """Luxemburg norm of the cellwise gradient magnitude (zero-boundary u)."""
    if not u.bc_zero:
        raise ValueError("sobolev_norm requires a zero-boundary grid function")
    mag = discrete_gradient(u).magnitude()
    value, _ = luxemburg_norm_cells(u.grid, mag, p)
    return value


@dataclass
class HolderReport:
    lhs: float
    rhs: float
    norm_u: float
    norm_v: float
    constant: float
    passed: bool


def check_holder(u: GridFunction, v: GridFunction, p: ExponentField) -> HolderReport:
    """Pairing bound |int u v| <= (1/p.lo + 1/p'.lo) |u|_p |v|_p'."""
    pc = conjugate_exponent(p)
    lhs = abs(cell_quadrature(u.grid, node_to_cell(u) * node_to_cell(v)))
    nu, _ = luxemburg_norm(u, p)
    nv, _ = luxemburg_norm(v, pc)
    const = 1.0 / p.lo + 1.0 / pc.lo
    rhs = const * nu * nv
    return HolderReport(lhs, rhs, nu, nv, const, lhs <= rhs + _REL_SLACK * rhs)


@dataclass
class SandwichReport:
    norm: float
    modular: float
    side: str  # "above_one", "below_one", "at_one"
    lower: float
    upper: float
    passed: bool


def check_modular_norm_relations(u: GridFunction, p: ExponentField) -> SandwichReport:
    """Norm-modular sandwich: the modular sits between norm^lo and norm^hi,
    with the exponents swapping roles on either side of norm = 1."""
    nu, trace = luxemburg_norm(u, p)
    rho = modular(u, p)
    if abs(nu - 1.0) <= NORM_TOL:
        ok = abs(rho - 1.0) <= NORM_TOL
        return SandwichReport(nu, rho, "at_one", 1.0, 1.0, ok)
    if nu > 1.0:
        lower, upper = nu**p.lo, nu**p.hi
        side = "above_one"
    else:
        lower, upper = nu**p.hi, nu**p.lo
        side = "below_one"
    ok = lower * (1.0 - _REL_SLACK) <= rho <= upper * (1.0 + _REL_SLACK)
    return SandwichReport(nu, rho, side, lower, upper, ok)


@dataclass
class InclusionReport:
    lhs: float
    rhs: float
    constant: float
    passed: bool


def check_inclusion_bound(
    u: GridFunction, r1: ExponentField, r2: ExponentField
) -> InclusionReport:
    """Embedding bound |u|_{r1} <= (|domain|+1) |u|_{r2} for r1 <= r2 pointwise."""
    if np.any(r1.values > r2.values):
        raise ValueError("inclusion bound requires r1 <= r2 at every cell")
    const = u.grid.volume + 1.0
    n1, _ = luxemburg_norm(u, r1)
    n2, _ = luxemburg_norm(u, r2)
    rhs = const * n2
    return InclusionReport(n1, rhs, const, n1 <= rhs + _REL_SLACK * rhs)
