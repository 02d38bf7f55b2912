"""Scaling triple, phase-space grids and sampled symbol fields.

The joint limit studied by this package couples the Planck constant to the
truncation rank through hbar * N = mu.  Everything downstream receives that
triple through :class:`SemiclassicalScale`.  Phase-space data lives on
midpoint-rule rectangular grids (:class:`PhaseGrid`) as plain real arrays
(:class:`SymbolField`); the L2 reductions here are the only place grid
weights enter.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SemiclassicalScale",
    "PhaseGrid",
    "SymbolField",
    "pairwise_sum",
    "l2_norm_sq_grid",
    "l2_distance_sq_grid",
    "worker_count",
]

def worker_count() -> int:
    """Worker-thread cap from the WEYL_THREADS environment variable (>= 1)."""
    raw = os.environ.get("WEYL_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"WEYL_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"WEYL_THREADS must be a positive integer, got {n}")
    return n


def pairwise_sum(values: np.ndarray) -> float:
    """Sum with a strict binary reduction tree.

    The array is zero-padded to the next power of two and folded in halves,
    so the tree shape is a pure function of the array length: rounding error
    grows like O(log n), and the result never depends on how the array was
    produced (row chunking, threading) as long as element order is fixed.
    """
    flat = np.ascontiguousarray(values, dtype=float).ravel()
    n = flat.size
    if n == 0:
        return 0.0
    width = 1 << (n - 1).bit_length()
    if width != n:
        padded = np.zeros(width)
        padded[:n] = flat
        flat = padded
    else:
        flat = flat.copy()
    while flat.size > 1:
        half = flat.size // 2
        flat = flat[:half] + flat[half:]
    return float(flat[0])


@dataclass(frozen=True)
class SemiclassicalScale:
    """The coupled triple (hbar, N, mu) with hbar * N = mu."""

    n_levels: int
    mu: float
    hbar: float

    def __post_init__(self) -> None:
        if self.n_levels < 1:
            raise ValueError(f"n_levels must be >= 1, got {self.n_levels}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if abs(self.hbar * self.n_levels - self.mu) > 1e-14 * abs(self.mu):
            raise ValueError(
                f"hbar * n_levels = {self.hbar * self.n_levels!r} is not mu = {self.mu!r}"
            )

    @classmethod
    def from_mu(cls, n_levels: int, mu: float) -> "SemiclassicalScale":
        return cls(n_levels=n_levels, mu=mu, hbar=mu / n_levels)

    @classmethod
    def from_hbar(cls, n_levels: int, hbar: float) -> "SemiclassicalScale":
        return cls(n_levels=n_levels, mu=hbar * n_levels, hbar=hbar)


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform midpoint-rule lattice on [x_min, x_max] x [p_min, p_max].

    Sample points are cell centers, x_i = x_min + (i + 1/2) dx, so constant
    fields integrate exactly and no endpoint is double weighted.
    """

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np: int

    def __post_init__(self) -> None:
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if not self.p_min < self.p_max:
            raise ValueError("p_min must be < p_max")
        if self.nx < 2 or self.np < 2:
            raise ValueError("nx and np must be >= 2")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.np

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def p_centers(self) -> np.ndarray:
        return self.p_min + (np.arange(self.np) + 0.5) * self.dp

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(nx, 1) x-column and (1, np) p-row, ready to broadcast."""
        return self.x_centers()[:, None], self.p_centers()[None, :]

    def contains(self, x: float, p: float) -> bool:
        return self.x_min <= x <= self.x_max and self.p_min <= p <= self.p_max


@dataclass(frozen=True)
class SymbolField:
    """Real field sampled on a :class:`PhaseGrid`, values[i, j] = f(x_i, p_j)."""

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.nx, self.grid.np):
            raise ValueError(
                f"values shape {vals.shape} does not match grid ({self.grid.nx}, {self.grid.np})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, fn, grid: PhaseGrid) -> "SymbolField":
        """Sample a broadcastable callable fn(x, p) on the grid."""
        x, p = grid.meshgrid()
        vals = np.broadcast_to(np.asarray(fn(x, p), dtype=float), (grid.nx, grid.np))
        return cls(grid=grid, values=vals)

    def to_csv(self, path) -> None:
        """Write rows `x,p,value`, x outer ascending, p inner ascending."""
        g = self.grid
        xs = np.repeat(g.x_centers(), g.np)
        ps = np.tile(g.p_centers(), g.nx)
        data = np.column_stack([xs, ps, self.values.ravel(order="C")])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,p,value", comments="")


def l2_norm_sq_grid(field: SymbolField) -> float:
    """Midpoint-rule value of the squared L2 norm over the grid window."""
    g = field.grid
    return pairwise_sum(field.values**2) * g.dx * g.dp


def l2_distance_sq_grid(a: SymbolField, b: SymbolField) -> float:
    """Midpoint-rule value of the squared L2 distance; grids must coincide."""
    if a.grid != b.grid:
        raise ValueError("incompatible grids")
    g = a.grid
    return pairwise_sum((a.values - b.values) ** 2) * g.dx * g.dp
