"""Run configuration: tolerances, sampling grid, search budget and dilation depth."""

from __future__ import annotations

from dataclasses import dataclass, field

from .charfn import DEFAULT_GRID, GridSpec
from .dilation import DEFAULT_DEPTH
from .numerics import DEFAULT_TOL, Tolerance
from .verdict import Budget

__all__ = ["Config"]


@dataclass(frozen=True)
class Config:
    tol: Tolerance = field(default=DEFAULT_TOL)
    grid: GridSpec = field(default=DEFAULT_GRID)
    budget: Budget = field(default_factory=Budget)
    depth: int = DEFAULT_DEPTH

    def to_dict(self) -> dict:
        return {
            "tol": self.tol.to_dict(),
            "grid": self.grid.to_dict(),
            "budget": self.budget.to_dict(),
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        tol = Tolerance(**d.get("tol", {}))
        g = dict(d.get("grid", {}))
        if "radii" in g:
            g["radii"] = tuple(g["radii"])
        if g.get("points") is not None:
            g["points"] = tuple(complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in g["points"])
        return cls(tol, GridSpec(**g), Budget(**d.get("budget", {})), int(d.get("depth", DEFAULT_DEPTH)))
