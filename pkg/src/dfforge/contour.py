"""Isocontours of an even DF in the ``(energy, L_z)`` plane.

Levels are geometric, ``f_max * ratio**k`` for ``k = 1, 2, ...``, anchored at
the largest value on the grid. Only the physical part of the plane is
contoured; its edge is returned as a separate curve. Marching squares come from
:func:`skimage.measure.find_contours`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.spatial import cKDTree
from skimage.measure import find_contours

from dfforge.synthesis import DistributionFunction
from dfforge.verify import PhysicalDomain

__all__ = ["ContourSpec", "ContourLevel", "ContourSet", "geometric_levels", "contour_data", "mirror_mismatch"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContourSpec:
    e_min: float = 0.0
    e_max: float = 3.0
    e_steps: int = 241
    lz_max: float = 3.0
    lz_steps: int = 241
    ratio: float = 0.4
    n_levels: int = 10
    levels: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not 0 < self.ratio < 1:
            raise ValueError(f"level ratio must lie in (0, 1), got {self.ratio}")
        if self.lz_steps % 2 == 0:
            raise ValueError("lz_steps must be odd so that L_z = 0 is a grid line")


@dataclass(frozen=True)
class ContourLevel:
    level: float
    paths: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class ContourSet:
    levels: tuple[ContourLevel, ...]
    boundary: np.ndarray
    f_max: float
    ratio: float
    energy: np.ndarray = field(repr=False)
    lz: np.ndarray = field(repr=False)

    @property
    def level_values(self) -> list[float]:
        return [c.level for c in self.levels]

    def to_dict(self) -> dict[str, Any]:
        return {
            "ratio": self.ratio,
            "f_max": self.f_max,
            "levels": [{"level": c.level, "paths": [p.tolist() for p in c.paths]} for c in self.levels],
            "boundary": self.boundary.tolist(),
            "grid": {
                "e_min": float(self.energy[0]), "e_max": float(self.energy[-1]),
                "e_steps": int(self.energy.size),
                "lz_max": float(self.lz[-1]), "lz_steps": int(self.lz.size),
            },
        }


def geometric_levels(f_max: float, ratio: float = 0.4, n_levels: int = 10) -> list[float]:
    """``f_max * ratio**k`` for ``k = 1 .. n_levels``."""
    return [f_max * ratio**k for k in range(1, n_levels + 1)]


def _symmetric_axis(vmax: float, steps: int) -> np.ndarray:
    half = np.linspace(0.0, vmax, steps // 2 + 1)
    return np.concatenate([-half[:0:-1], half])


def _to_coords(path: np.ndarray, energy: np.ndarray, lz: np.ndarray) -> np.ndarray:
    ie = np.arange(energy.size)
    il = np.arange(lz.size)
    return np.column_stack([np.interp(path[:, 0], ie, energy), np.interp(path[:, 1], il, lz)])


def contour_data(df: DistributionFunction, domain: PhysicalDomain | None,
                 spec: ContourSpec = ContourSpec()) -> ContourSet:
    """Contour ``df`` over the physical part of the grid described by ``spec``."""
    energy = np.linspace(spec.e_min, spec.e_max, spec.e_steps)
    lz = _symmetric_axis(spec.lz_max, spec.lz_steps)
    EE, LL = np.meshgrid(energy, lz, indexing="ij")
    f = np.asarray(df(EE, LL), dtype=float)

    if domain is not None:
        half = lz[lz.size // 2:]
        lim_half = np.array([domain.energy_limit(L) for L in half])
        lim = np.concatenate([lim_half[:0:-1], lim_half])
        mask = EE <= lim[None, :] if domain.bounded else EE >= lim[None, :]
        keep = (lim > 0) if domain.bounded else (lim <= spec.e_max)
        boundary = np.column_stack([lim[keep], lz[keep]])
    else:
        mask = np.ones_like(f, dtype=bool)
        boundary = np.empty((0, 2))
    inside = f[mask]
    f_max = float(inside.max()) if inside.size else 0.0

    values = list(spec.levels) if spec.levels is not None else geometric_levels(
        f_max, spec.ratio, spec.n_levels)
    levels = []
    for v in values:
        if not (f_max > 0 and v < f_max):
            log.warning("contour level %.6g is not below the grid maximum %.6g; no curves", v, f_max)
            levels.append(ContourLevel(float(v), ()))
            continue
        paths = find_contours(f, v, mask=mask)
        levels.append(ContourLevel(float(v), tuple(_to_coords(p, energy, lz) for p in paths)))
    return ContourSet(tuple(levels), boundary, f_max, spec.ratio, energy, lz)


def mirror_mismatch(cs: ContourSet) -> float:
    """Largest distance from a contour point to the mirror image (``L_z -> -L_z``) of its level."""
    worst = 0.0
    for lev in cs.levels:
        if not lev.paths:
            continue
        pts = np.concatenate(lev.paths)
        dist, _ = cKDTree(pts * np.array([1.0, -1.0])).query(pts)
        worst = max(worst, float(dist.max()))
    return worst
