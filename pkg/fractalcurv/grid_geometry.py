"""Raster geometry: masks, exact distance fields and total curvatures of parallel sets.

Masks are boolean arrays of shape ``(height, width)`` indexed ``[iy, ix]``;
cell ``(ix, iy)`` has its center at ``origin + ((ix + 0.5) h, (iy + 0.5) h)``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, cKDTree

from . import _kernels, polygons
from .errors import BoundsError, DomainError, EmptyLevelSetWarning, EmptySetError, ResolutionError

logger = logging.getLogger("fractalcurv")

# cells of padding beyond the largest queried radius
PAD_CELLS = 4


@dataclass(frozen=True)
class GridSpec:
    origin: Tuple[float, float]
    h: float
    width: int
    height: int

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError("cell size must be positive")
        if self.width < 1 or self.height < 1:
            raise DomainError("grid must have at least one cell")

    @classmethod
    def covering(cls, vertices: np.ndarray, radius: float, h: float) -> "GridSpec":
        """Grid containing ``vertices`` dilated by ``radius`` plus PAD_CELLS cells."""
        pts = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
        pad = radius + PAD_CELLS * h
        lo = pts.min(axis=0) - pad
        hi = pts.max(axis=0) + pad
        width, height = np.ceil((hi - lo) / h).astype(int)
        return cls((float(lo[0]), float(lo[1])), float(h), int(width), int(height))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def upper(self) -> Tuple[float, float]:
        return self.origin[0] + self.width * self.h, self.origin[1] + self.height * self.h

    @property
    def diameter(self) -> float:
        return self.h * math.hypot(self.width, self.height)

    def centers(self, mask: np.ndarray) -> np.ndarray:
        """Centers of the foreground cells, shape (n, 2)."""
        iy, ix = np.nonzero(mask)
        return np.column_stack([self.origin[0] + (ix + 0.5) * self.h, self.origin[1] + (iy + 0.5) * self.h])

    def cell_of(self, point) -> Tuple[int, int]:
        x, y = point
        return int(math.floor((x - self.origin[0]) / self.h)), int(math.floor((y - self.origin[1]) / self.h))


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distances to the nearest seed center, stored as exact squared cell counts."""
    squared: np.ndarray
    grid: GridSpec

    @property
    def values(self) -> np.ndarray:
        return self.grid.h * np.sqrt(self.squared)


@dataclass(frozen=True)
class CurvatureVector:
    c0: int
    c1: float
    c2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2], dtype=np.float64)

    def __getitem__(self, k: int):
        return (self.c0, self.c1, self.c2)[k]

    def to_dict(self):
        return {"c0": self.c0, "c1": self.c1, "c2": self.c2}


def rasterize_polygons(
    polys: np.ndarray, grid: GridSpec, mark_centroids: bool = False, tol: float = 1e-12
) -> np.ndarray:
    """Foreground iff the cell center lies in some closed polygon.

    With ``mark_centroids`` the cell holding each polygon's vertex mean is also
    marked, so pieces smaller than a cell still leave a seed.
    """
    polys = np.asarray(polys, dtype=np.float64)
    if polys.size == 0:
        return np.zeros(grid.shape, dtype=bool)
    if polys.ndim == 2:
        polys = polys[None]
    lo = polys.reshape(-1, 2).min(axis=0)
    hi = polys.reshape(-1, 2).max(axis=0)
    ux, uy = grid.upper
    slack = 1e-9 * grid.h
    if lo[0] < grid.origin[0] - slack or lo[1] < grid.origin[1] - slack or hi[0] > ux + slack or hi[1] > uy + slack:
        raise BoundsError("polygons extend beyond the grid rectangle")
    polys = polygons.counterclockwise(polys)
    return _kernels.rasterize(
        np.ascontiguousarray(polys), grid.origin[0], grid.origin[1], grid.h,
        grid.height, grid.width, tol, mark_centroids,
    )


def distance_field(seeds: np.ndarray, grid: GridSpec) -> DistanceField:
    """Exact Euclidean distance transform by two passes of parabola lower envelopes."""
    if not seeds.any():
        raise EmptySetError("distance field of an empty seed mask")
    columns = _kernels.column_pass(np.ascontiguousarray(seeds, dtype=np.bool_))
    return DistanceField(_kernels.row_pass(columns), grid)


def parallel_mask(field: DistanceField, r: float) -> np.ndarray:
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    return field.values <= r


def area(mask: np.ndarray, grid: GridSpec) -> float:
    return float(np.count_nonzero(mask)) * grid.h ** 2


def euler_char(mask: np.ndarray) -> int:
    """V - E + F of the union of closed unit cells over the foreground."""
    m = np.asarray(mask, dtype=bool)
    p = np.pad(m, 1)
    vertices = p[:-1, :-1] | p[:-1, 1:] | p[1:, :-1] | p[1:, 1:]
    horizontal = p[:-1, 1:-1] | p[1:, 1:-1]
    vertical = p[1:-1, :-1] | p[1:-1, 1:]
    edges = np.count_nonzero(horizontal) + np.count_nonzero(vertical)
    return int(np.count_nonzero(vertices) - edges + np.count_nonzero(m))


def euler_char_flood(mask: np.ndarray) -> int:
    """Components minus bounded holes; 8-connected foreground, 4-connected background."""
    m = np.asarray(mask, dtype=bool)
    _, n_fg = ndimage.label(m, structure=np.ones((3, 3), dtype=int))
    _, n_bg = ndimage.label(~np.pad(m, 1))
    return int(n_fg - (n_bg - 1))


def boundary_length(field: DistanceField, r: float, grid: GridSpec) -> float:
    """Full length of the interpolated contour {d = r}; zero with a warning if it is empty."""
    values = field.values
    if not values.min() < r < values.max():
        warnings.warn(f"level set d = {r} is empty on this grid", EmptyLevelSetWarning, stacklevel=2)
        return 0.0
    return grid.h * float(_kernels.contour_length(values, float(r)))


def curvature_vector(field: DistanceField, r: float, grid: GridSpec) -> CurvatureVector:
    if r < 2 * grid.h:
        raise ResolutionError(f"radius {r} is below two cells ({2 * grid.h}); refine the grid")
    mask = parallel_mask(field, r)
    return CurvatureVector(
        c0=euler_char(mask),
        c1=0.5 * boundary_length(field, r, grid),
        c2=area(mask, grid),
    )


def _distance_to_hull(points: np.ndarray, x: np.ndarray) -> float:
    if len(points) == 1:
        return float(np.linalg.norm(points[0] - x))
    centered = points - points.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0:
        return float(np.linalg.norm(points[0] - x))
    if len(s) < 2 or s[1] <= 1e-12 * s[0]:
        t = centered @ vt[0]
        segment = np.stack([points[np.argmin(t)], points[np.argmax(t)]])
        return float(polygons._points_to_segments(x[None, :], segment))
    hull = points[ConvexHull(points).vertices]
    if polygons.contains_points(hull, x[None, :])[0]:
        return 0.0
    return float(polygons._points_to_segments(x[None, :], hull))


def regularity_probe(seeds: np.ndarray, x, tol: float = 0.0) -> float:
    """Distance from x to the convex hull of its tol-near nearest seeds.

    Zero flags x as (approximately) critical for the distance function.
    """
    pts = np.asarray(seeds, dtype=np.float64).reshape(-1, 2)
    if not len(pts):
        raise EmptySetError("regularity probe needs at least one seed")
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    tree = cKDTree(pts)
    d, _ = tree.query(x)
    reach = d + tol
    near = tree.query_ball_point(x, reach + 1e-12 * max(reach, 1.0))
    return _distance_to_hull(pts[np.sort(near)], x)


def probe_level_set(
    field: DistanceField, grid: GridSpec, r: float, points: np.ndarray, tol: float, samples: int = 64
) -> np.ndarray:
    """Regularity probe at up to ``samples`` cell centers lying on the contour {d = r}.

    Returns an array of (x, y, J) rows.
    """
    values = field.values
    band = np.abs(values - r) <= 0.5 * grid.h
    centers = grid.centers(band)
    if not len(centers):
        warnings.warn(f"level set d = {r} is empty on this grid", EmptyLevelSetWarning, stacklevel=2)
        return np.empty((0, 3))
    pick = np.unique(np.linspace(0, len(centers) - 1, min(samples, len(centers))).round().astype(int))
    tree = cKDTree(points)
    rows = []
    for c in centers[pick]:
        d, _ = tree.query(c)
        near = tree.query_ball_point(c, d + tol + 1e-12 * max(d, 1.0))
        rows.append((c[0], c[1], _distance_to_hull(points[np.sort(near)], c)))
    logger.debug(f"level set probed | r={r} | samples={len(rows)}")
    return np.array(rows)
