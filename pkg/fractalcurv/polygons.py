"""Convex polygon helpers on numpy vertex arrays.

Polygons are arrays of shape ``(..., V, 2)`` holding vertices in cyclic order.
Batched functions broadcast over the leading axes.
"""
import numpy as np


def signed_area(vertices: np.ndarray) -> np.ndarray:
    x = vertices[..., 0]
    y = vertices[..., 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=-1) - np.roll(x, -1, axis=-1) * y, axis=-1)


def area(vertices: np.ndarray) -> np.ndarray:
    return np.abs(signed_area(vertices))


def counterclockwise(vertices: np.ndarray) -> np.ndarray:
    """Return the polygons with counterclockwise vertex order."""
    vertices = np.asarray(vertices, dtype=np.float64)
    flip = signed_area(vertices) < 0
    if vertices.ndim == 2:
        return vertices[::-1].copy() if flip else vertices
    out = vertices.copy()
    out[flip] = out[flip][:, ::-1]
    return out


def diameter(vertices: np.ndarray) -> float:
    v = np.asarray(vertices, dtype=np.float64)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).max())


def centroid(vertices: np.ndarray) -> np.ndarray:
    return vertices.mean(axis=-2)


def is_convex(vertices: np.ndarray, tol: float = 1e-12) -> bool:
    v = counterclockwise(vertices)
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool(np.all(cross >= -tol))


def _edge_normals(vertices: np.ndarray) -> np.ndarray:
    """Unit outward normals of counterclockwise polygons, shape (..., V, 2)."""
    e = np.roll(vertices, -1, axis=-2) - vertices
    n = np.stack([e[..., 1], -e[..., 0]], axis=-1)
    length = np.linalg.norm(n, axis=-1, keepdims=True)
    return n / np.where(length > 0, length, 1.0)


def edge_clearance(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Signed distance from points to the boundary of a convex polygon.

    Positive inside (distance to the nearest supporting line), negative outside
    (a lower bound on the true outside distance, exact up to corner regions).
    ``polygon`` must be counterclockwise, shape (V, 2); ``points`` shape (..., 2).
    """
    normals = _edge_normals(polygon)
    offsets = np.einsum("vi,vi->v", normals, polygon)
    return (offsets - points @ normals.T).min(axis=-1)


def contains_points(polygon: np.ndarray, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    normals = _edge_normals(polygon)
    offsets = np.einsum("vi,vi->v", normals, polygon)
    return np.all(points @ normals.T <= offsets + tol, axis=-1)


def separation(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Largest projection gap over all edge normals of both polygons.

    Positive means the polygons are disjoint, zero means they touch, negative
    means their interiors overlap. Inputs are counterclockwise, shapes (..., V, 2)
    and (..., W, 2).
    """
    axes = np.concatenate([_edge_normals(first), _edge_normals(second)], axis=-2)
    p = np.einsum("...vi,...ai->...av", first, axes)
    q = np.einsum("...wi,...ai->...aw", second, axes)
    gap = np.maximum(q.min(axis=-1) - p.max(axis=-1), p.min(axis=-1) - q.max(axis=-1))
    return gap.max(axis=-1)


def _points_to_segments(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Min distance from each of V points to the W edges of ``polygon`` (batched)."""
    a = polygon
    b = np.roll(polygon, -1, axis=-2)
    ab = b - a
    ap = points[..., :, None, :] - a[..., None, :, :]
    denom = np.einsum("...wi,...wi->...w", ab, ab)[..., None, :]
    t = np.einsum("...vwi,...wi->...vw", ap, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a[..., None, :, :] + t[..., None] * ab[..., None, :, :]
    d = np.linalg.norm(points[..., :, None, :] - closest, axis=-1)
    return d.min(axis=(-1, -2))


def convex_distance(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Euclidean distance between closed convex polygons (0 when they meet)."""
    first = np.asarray(first, dtype=np.float64)
    second = np.asarray(second, dtype=np.float64)
    apart = separation(first, second) > 0
    d = np.minimum(_points_to_segments(first, second), _points_to_segments(second, first))
    return np.where(apart, d, 0.0)
