"""Exponent fields and the hypothesis checks of the two existence results.

Field values are sampled at cell centers (co-located with the quadrature).
The cached infimum/supremum additionally probe a dense closed lattice of the
analytic spec, including the boundary, so the summaries reflect the continuous
field and always bracket the cell samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CriticalExponentError, ExponentRangeError
from .fieldexpr import as_field_function
from .grid import DomainGrid

__all__ = [
    "ExponentField",
    "ExponentSet",
    "ConditionRow",
    "HypothesisReport",
    "build_exponent_set",
    "validate_hypotheses",
    "critical_exponent",
    "conjugate_exponent",
]

# minimum number of intervals per axis in the dense summary lattice
_DENSE_MIN = 64


def _dense_axes(grid: DomainGrid) -> list[np.ndarray]:
    axes = []
    for e, r in zip(grid.extent, grid.res):
        n = max(_DENSE_MIN, 4 * (r - 1))
        n += n % 2  # even interval count keeps midpoints on the lattice
        axes.append(np.linspace(0.0, e, n + 1))
    return axes


def _sample(fn, axes: list[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    out = np.asarray(fn(*mesh), dtype=float)
    return np.broadcast_to(out, mesh[0].shape).copy()


@dataclass
class ExponentField:
    """One exponent value per cell with cached range summaries (lo, hi)."""

    grid: DomainGrid
    values: np.ndarray
    lo: float
    hi: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.cell_shape:
            raise ValueError(
                f"exponent shape {vals.shape} != cell shape {self.grid.cell_shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ExponentRangeError("exponent field must be finite")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ExponentRangeError("exponent summaries must be finite")
        if self.lo <= 1.0:
            raise ExponentRangeError(
                f"exponent infimum must exceed 1, got {self.lo}"
            )
        if self.lo > self.hi:
            raise ExponentRangeError(f"lo {self.lo} > hi {self.hi}")
        if vals.min() < self.lo or vals.max() > self.hi:
            raise ExponentRangeError("cached summaries do not bracket the samples")
        self.values = vals

    @classmethod
    def from_values(cls, grid: DomainGrid, values) -> "ExponentField":
        vals = np.broadcast_to(np.asarray(values, dtype=float), grid.cell_shape).copy()
        return cls(grid, vals, float(vals.min()), float(vals.max()))

    def is_constant(self) -> bool:
        return self.lo == self.hi


@dataclass
class ExponentSet:
    """The two gradient exponents, their pointwise max, and the source exponent."""

    p1: ExponentField
    p2: ExponentField
    pmax: ExponentField
    q: ExponentField

    def __post_init__(self):
        if not np.array_equal(
            self.pmax.values, np.maximum(self.p1.values, self.p2.values)
        ):
            raise ValueError("pmax is not the pointwise max of p1 and p2")

    @property
    def grid(self) -> DomainGrid:
        return self.p1.grid

    @property
    def dim(self) -> int:
        return self.grid.dim

    def summary(self) -> dict:
        return {
            name: {"lo": f.lo, "hi": f.hi}
            for name, f in (
                ("p1", self.p1),
                ("p2", self.p2),
                ("pmax", self.pmax),
                ("q", self.q),
            )
        }


def build_exponent_set(p1_spec, p2_spec, q_spec, grid: DomainGrid) -> ExponentSet:
    """Sample the three exponent specs; derive the pointwise max field.

    Raises ExponentRangeError if any sampled value (cells or dense lattice)
    is <= 1.
    """
    cell_axes = grid.cell_axes()
    dense_axes = _dense_axes(grid)
    fields = {}
    dense = {}
    for name, spec in (("p1", p1_spec), ("p2", p2_spec), ("q", q_spec)):
        fn = as_field_function(spec, grid.dim)
        cells = _sample(fn, cell_axes)
        probe = _sample(fn, dense_axes)
        if cells.min() <= 1.0 or probe.min() <= 1.0:
            raise ExponentRangeError(
                f"exponent {name} must exceed 1 everywhere "
                f"(min sampled value {min(cells.min(), probe.min())})"
            )
        lo = float(min(cells.min(), probe.min()))
        hi = float(max(cells.max(), probe.max()))
        fields[name] = ExponentField(grid, cells, lo, hi)
        dense[name] = probe
    pm_cells = np.maximum(fields["p1"].values, fields["p2"].values)
    pm_dense = np.maximum(dense["p1"], dense["p2"])
    pmax = ExponentField(
        grid,
        pm_cells,
        float(min(pm_cells.min(), pm_dense.min())),
        float(max(pm_cells.max(), pm_dense.max())),
    )
    return ExponentSet(fields["p1"], fields["p2"], pmax, fields["q"])


def conjugate_exponent(p: ExponentField) -> ExponentField:
    """Pointwise dual exponent p/(p-1).  Involutive to rounding."""
    vals = p.values / (p.values - 1.0)
    # the map is decreasing, so the summaries swap roles
    lo = p.hi / (p.hi - 1.0)
    hi = p.lo / (p.lo - 1.0)
    return ExponentField(p.grid, vals, min(lo, float(vals.min())), max(hi, float(vals.max())))


def critical_exponent(p: ExponentField) -> ExponentField:
    """Sobolev-critical exponent N*p/(N-p); refuses when p reaches N anywhere."""
    n = float(p.grid.dim)
    if p.hi >= n:
        raise CriticalExponentError(
            f"exponent reaches the dimension ({p.hi} >= {n}); critical exponent undefined"
        )
    vals = n * p.values / (n - p.values)
    lo = n * p.lo / (n - p.lo)
    hi = n * p.hi / (n - p.hi)
    return ExponentField(p.grid, vals, min(lo, float(vals.min())), max(hi, float(vals.max())))


@dataclass
class ConditionRow:
    """One hypothesis: require ``lhs op rhs`` with strict/exact comparison."""

    name: str
    lhs: float
    op: str  # "<" or ">="
    rhs: float
    satisfied: bool = field(init=False)

    def __post_init__(self):
        if self.op == "<":
            self.satisfied = self.lhs < self.rhs
        elif self.op == ">=":
            self.satisfied = self.lhs >= self.rhs
        else:
            raise ValueError(f"unsupported comparison {self.op!r}")


@dataclass
class HypothesisReport:
    form: str  # "mountain" or "coercive"
    conditions: list[ConditionRow]
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(c.satisfied for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "passed": self.passed,
            "conditions": [
                {
                    "name": c.name,
                    "lhs": c.lhs,
                    "op": c.op,
                    "rhs": c.rhs,
                    "satisfied": c.satisfied,
                }
                for c in self.conditions
            ],
        }


def validate_hypotheses(s: ExponentSet, form: str) -> HypothesisReport:
    """Check the hypothesis block for one of the two existence results.

    ``mountain``: saddle-point multiplicity (needs both gradient exponents
    bounded below by 2).  ``coercive``: global minimization.  Both need the
    max exponent strictly below the source exponent, global subcriticality,
    and dimension at least 3.
    """
    if form not in ("mountain", "coercive"):
        raise ValueError(f"form must be 'mountain' or 'coercive', got {form!r}")
    n = float(s.dim)
    rows = []
    if form == "mountain":
        rows.append(ConditionRow("p1.lo >= 2", s.p1.lo, ">=", 2.0))
        rows.append(ConditionRow("p2.lo >= 2", s.p2.lo, ">=", 2.0))
    rows.append(ConditionRow("pmax.hi < q.lo", s.pmax.hi, "<", s.q.lo))
    rows.append(ConditionRow("pmax.lo < dim", s.pmax.lo, "<", n))
    if s.pmax.lo < n:
        bound = n * s.pmax.lo / (n - s.pmax.lo)
    else:
        bound = float("inf")
    rows.append(ConditionRow("q.hi < dim*pmax.lo/(dim-pmax.lo)", s.q.hi, "<", bound))
    rows.append(ConditionRow("dim >= 3", n, ">=", 3.0))
    # pointwise versions, reported separately from the global summaries
    rows.append(
        ConditionRow(
            "pointwise max(pmax - q) < 0",
            float(np.max(s.pmax.values - s.q.values)),
            "<",
            0.0,
        )
    )
    if float(s.pmax.values.max()) < n:
        crit = n * s.pmax.values / (n - s.pmax.values)
        worst = float(np.max(s.q.values - crit))
    else:
        worst = float("inf")
    rows.append(ConditionRow("pointwise max(q - critical(pmax)) < 0", worst, "<", 0.0))
    return HypothesisReport(form, rows)
