"""Uniform box grids, grid functions, and the discrete calculus on them.

Scalars live on nodes, integrands and gradients live on cells.  The two
transfer maps (corner averaging and forward-difference gradients) are linear,
and their adjoints are provided so that energies can be differentiated
exactly at the discrete level.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainGrid",
    "GridFunction",
    "CellVectorField",
    "node_to_cell",
    "node_to_cell_values",
    "node_to_cell_adjoint",
    "discrete_gradient",
    "gradient_values",
    "discrete_gradient_adjoint",
    "cell_quadrature",
    "cell_quadrature_values",
    "pairing",
    "l2_norm",
]

# lo/hi index ranges of a cell's corner nodes along one axis
_LO_HI = (slice(0, -1), slice(1, None))


def _corner_slices(ndim):
    """All 2^ndim corner selections of the cells, as slice tuples on node arrays."""
    return [
        tuple(_LO_HI[b] for b in bits)
        for bits in itertools.product((0, 1), repeat=ndim)
    ]


@dataclass(frozen=True)
class DomainGrid:
    """Uniform axis-aligned box grid in dimension 2 or 3.

    ``res`` counts nodes per axis (>= 4), so spacing is extent/(res-1).
    """

    dim: int
    res: tuple[int, ...]
    extent: tuple[float, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        res = tuple(int(r) for r in np.broadcast_to(self.res, (self.dim,)))
        if any(r < 4 for r in res):
            raise ValueError(f"need at least 4 nodes per axis, got res={res}")
        extent = self.extent if self.extent is not None else 1.0
        extent = tuple(float(e) for e in np.broadcast_to(extent, (self.dim,)))
        if any(e <= 0 for e in extent):
            raise ValueError(f"extent must be positive, got {extent}")
        object.__setattr__(self, "res", res)
        object.__setattr__(self, "extent", extent)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(e / (r - 1) for e, r in zip(self.extent, self.res))

    @property
    def node_shape(self) -> tuple[int, ...]:
        return self.res

    @property
    def cell_shape(self) -> tuple[int, ...]:
        return tuple(r - 1 for r in self.res)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.res))

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.cell_shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def node_axes(self) -> list[np.ndarray]:
        """1D node coordinates per axis."""
        return [np.linspace(0.0, e, r) for e, r in zip(self.extent, self.res)]

    def cell_axes(self) -> list[np.ndarray]:
        """1D cell-center coordinates per axis."""
        return [0.5 * (ax[:-1] + ax[1:]) for ax in self.node_axes()]

    def node_mesh(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.node_axes(), indexing="ij"))

    def cell_mesh(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.cell_axes(), indexing="ij"))

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.node_shape, dtype=bool)
        for a in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[a] = 0
            mask[tuple(sl)] = True
            sl[a] = -1
            mask[tuple(sl)] = True
        return mask

    def corner_slices(self):
        return _corner_slices(self.dim)


@dataclass
class GridFunction:
    """Scalar node samples, optionally pinned to zero on the boundary."""

    grid: DomainGrid
    values: np.ndarray
    bc_zero: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.node_shape:
            raise ValueError(
                f"values shape {vals.shape} != node shape {self.grid.node_shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        if self.bc_zero and np.any(vals[self.grid.boundary_mask()] != 0.0):
            raise ValueError("bc_zero grid function has nonzero boundary values")
        self.values = vals

    @classmethod
    def zeros(cls, grid: DomainGrid, bc_zero: bool = True) -> "GridFunction":
        return cls(grid, np.zeros(grid.node_shape), bc_zero=bc_zero)

    @classmethod
    def from_nodes(cls, grid: DomainGrid, fn, bc_zero: bool = False) -> "GridFunction":
        """Sample ``fn(x1, ..., xN)`` at the nodes; project to zero boundary if asked."""
        vals = np.asarray(fn(*grid.node_mesh()), dtype=float)
        vals = np.broadcast_to(vals, grid.node_shape).copy()
        if bc_zero:
            vals[grid.boundary_mask()] = 0.0
        return cls(grid, vals, bc_zero=bc_zero)

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy(), bc_zero=self.bc_zero)

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values, bc_zero=self.bc_zero)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(
            self.grid,
            self.values + other.values,
            bc_zero=self.bc_zero and other.bc_zero,
        )

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(
            self.grid,
            self.values - other.values,
            bc_zero=self.bc_zero and other.bc_zero,
        )

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(c), bc_zero=self.bc_zero)

    __rmul__ = __mul__


@dataclass
class CellVectorField:
    """One vector per cell; component axis first."""

    grid: DomainGrid
    comps: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.comps, dtype=float)
        want = (self.grid.dim,) + self.grid.cell_shape
        if comps.shape != want:
            raise ValueError(f"component shape {comps.shape} != {want}")
        if not np.all(np.isfinite(comps)):
            raise ValueError("vector field entries must be finite")
        self.comps = comps

    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.sum(self.comps * self.comps, axis=0))


def node_to_cell_values(grid: DomainGrid, vals: np.ndarray) -> np.ndarray:
    """Corner average on the trailing node axes (leading axes are batch)."""
    w = 2.0 ** (-grid.dim)
    out = np.zeros(vals.shape[: vals.ndim - grid.dim] + grid.cell_shape)
    for sl in grid.corner_slices():
        out += w * vals[(Ellipsis,) + sl]
    return out


def node_to_cell(u: GridFunction) -> np.ndarray:
    """Corner average of node values: one scalar per cell.  Linear in u."""
    return node_to_cell_values(u.grid, u.values)


def node_to_cell_adjoint(grid: DomainGrid, cells: np.ndarray) -> np.ndarray:
    """Transpose of :func:`node_to_cell`: scatter cell scalars to corner nodes."""
    w = 2.0 ** (-grid.dim)
    out = np.zeros(cells.shape[: cells.ndim - grid.dim] + grid.node_shape)
    for sl in grid.corner_slices():
        out[(Ellipsis,) + sl] += w * cells
    return out


def gradient_values(grid: DomainGrid, vals: np.ndarray) -> np.ndarray:
    """Cell gradients on the trailing node axes; the component axis is
    inserted right before the cell axes."""
    w = 2.0 ** (1 - grid.dim)
    h = grid.h
    batch = vals.shape[: vals.ndim - grid.dim]
    comps = np.zeros(batch + (grid.dim,) + grid.cell_shape)
    for bits, sl in zip(
        itertools.product((0, 1), repeat=grid.dim), grid.corner_slices()
    ):
        term = w * vals[(Ellipsis,) + sl]
        for a in range(grid.dim):
            if bits[a]:
                comps[(Ellipsis, a) + (slice(None),) * grid.dim] += term / h[a]
            else:
                comps[(Ellipsis, a) + (slice(None),) * grid.dim] -= term / h[a]
    return comps


def discrete_gradient(u: GridFunction) -> CellVectorField:
    """Cellwise gradient: per axis, the mean forward difference over the cell's
    node pairs.  Exact for affine fields; linear in u."""
    return CellVectorField(u.grid, gradient_values(u.grid, u.values))


def discrete_gradient_adjoint(grid: DomainGrid, comps: np.ndarray) -> np.ndarray:
    """Transpose of :func:`gradient_values` applied to per-cell vectors."""
    w = 2.0 ** (1 - grid.dim)
    h = grid.h
    batch = comps.shape[: comps.ndim - grid.dim - 1]
    out = np.zeros(batch + grid.node_shape)
    cells = (slice(None),) * grid.dim
    for bits, sl in zip(
        itertools.product((0, 1), repeat=grid.dim), _corner_slices(grid.dim)
    ):
        acc = np.zeros(batch + grid.cell_shape)
        for a in range(grid.dim):
            if bits[a]:
                acc += comps[(Ellipsis, a) + cells] / h[a]
            else:
                acc -= comps[(Ellipsis, a) + cells] / h[a]
        out[(Ellipsis,) + sl] += w * acc
    return out


def cell_quadrature_values(grid: DomainGrid, w: np.ndarray) -> np.ndarray:
    """Box-rule integral over the trailing cell axes (batch-aware)."""
    w = np.asarray(w)
    if w.shape[w.ndim - grid.dim :] != grid.cell_shape:
        raise ValueError(f"cell data shape {w.shape} != {grid.cell_shape}")
    return grid.cell_volume * np.sum(w, axis=tuple(range(-grid.dim, 0)))


def cell_quadrature(grid: DomainGrid, w: np.ndarray) -> float:
    """Box-rule integral: cell volume times the sum of per-cell values."""
    w = np.asarray(w)
    if w.shape != grid.cell_shape:
        raise ValueError(f"cell data shape {w.shape} != {grid.cell_shape}")
    return float(cell_quadrature_values(grid, w))


def pairing(a: GridFunction, b: GridFunction) -> float:
    """Discrete L2 duality pairing on nodes: sum(a*b) * cell volume."""
    return a.grid.cell_volume * float(np.sum(a.values * b.values))


def l2_norm(u: GridFunction) -> float:
    """Discrete L2 norm on nodes."""
    return float(np.sqrt(u.grid.cell_volume * np.sum(u.values * u.values)))
