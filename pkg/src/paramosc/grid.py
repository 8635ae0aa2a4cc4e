"""Uniform space grids and sampled wave fields."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_j = x0 + j*dx, j = 0..n-1."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise GridError(f"grid needs at least 16 points, got {self.n}")
        if not self.dx > 0:
            raise GridError(f"grid spacing must be positive, got {self.dx}")

    @classmethod
    def centered(cls, center: float, half_width: float, n: int = 2048) -> "Grid":
        dx = 2.0 * half_width / (n - 1)
        return cls(center - half_width, dx, n)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x1(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def refined(self, factor: int = 2) -> "Grid":
        """Same interval with ``factor`` times smaller spacing."""
        return Grid(self.x0, self.dx / factor, (self.n - 1) * factor + 1)

    def to_dict(self) -> dict:
        return {"x0": self.x0, "dx": self.dx, "n": self.n}


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex samples of a wavefunction on ``grid`` at time ``t``.

    ``margin`` counts the cells at each end that hold no valid data (they are
    left behind by finite-difference stencils); norms and inner products skip
    them.
    """

    grid: Grid
    values: np.ndarray
    t: float
    meta: dict = field(default_factory=dict)
    margin: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise GridError(f"values have shape {v.shape}, grid has {self.grid.n} points")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def interior(self) -> slice:
        return slice(self.margin, self.grid.n - self.margin)

    def with_values(self, values, margin: int | None = None, **meta) -> "WaveField":
        m = self.margin if margin is None else margin
        return replace(self, values=values, margin=m, meta={**self.meta, **meta})

    def _common(self, other: "WaveField") -> slice:
        if other.grid != self.grid:
            raise GridError("wave fields live on different grids")
        m = max(self.margin, other.margin)
        return slice(m, self.grid.n - m)

    def inner(self, other: "WaveField") -> complex:
        """<self|other> by the trapezoid rule (exact tails are negligible)."""
        s = self._common(other)
        return complex(np.sum(np.conj(self.values[s]) * other.values[s]) * self.grid.dx)

    def norm(self) -> float:
        s = self.interior
        return float(np.sqrt(np.sum(np.abs(self.values[s]) ** 2) * self.grid.dx))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def __add__(self, other: "WaveField") -> "WaveField":
        self._common(other)
        return self.with_values(self.values + other.values, max(self.margin, other.margin))

    def __sub__(self, other: "WaveField") -> "WaveField":
        self._common(other)
        return self.with_values(self.values - other.values, max(self.margin, other.margin))

    def __mul__(self, c) -> "WaveField":
        return self.with_values(complex(c) * self.values)

    __rmul__ = __mul__


def relative_residual(lhs: WaveField, rhs: WaveField, ref: WaveField | None = None) -> float:
    """||lhs - rhs|| / ||ref|| over the common valid interior."""
    diff = lhs - rhs
    ref = lhs if ref is None else ref
    s = diff._common(ref)
    num = np.sqrt(np.sum(np.abs(diff.values[s]) ** 2))
    den = np.sqrt(np.sum(np.abs(ref.values[s]) ** 2))
    return float(num / den)
