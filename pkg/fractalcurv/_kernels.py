"""Compiled loops for the raster pipeline.

Arrays are indexed ``[row, col]`` = ``[iy, ix]``. Kernels are serial and
release the GIL so that Monte Carlo replicas can run them from threads.
"""
import numba as nb
import numpy as np

# squared-distance sentinel for "no seed in this column"; larger than any grid diagonal
INF = np.int64(1) << np.int64(60)


@nb.njit(cache=True, nogil=True)
def column_pass(seeds):
    """Squared vertical distance (in cells) to the nearest seed of the same column."""
    rows, cols = seeds.shape
    out = np.empty((rows, cols), dtype=np.int64)
    for c in range(cols):
        last = -1
        for r in range(rows):
            if seeds[r, c]:
                last = r
            out[r, c] = INF if last < 0 else (r - last) * (r - last)
        last = -1
        for r in range(rows - 1, -1, -1):
            if seeds[r, c]:
                last = r
            if last >= 0:
                d = (last - r) * (last - r)
                if d < out[r, c]:
                    out[r, c] = d
    return out


@nb.njit(cache=True, nogil=True)
def row_pass(g):
    """Lower envelope of the parabolas (x - q)^2 + g[q] along every row."""
    rows, cols = g.shape
    out = np.empty((rows, cols), dtype=np.int64)
    v = np.empty(cols, dtype=np.int64)
    z = np.empty(cols + 1, dtype=np.float64)
    for r in range(rows):
        f = g[r]
        k = -1
        for q in range(cols):
            if f[q] >= INF:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
                continue
            # z[0] = -inf keeps k >= 0
            p = v[k]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            while s <= z[k]:
                k -= 1
                p = v[k]
                s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        if k < 0:
            for x in range(cols):
                out[r, x] = INF
            continue
        j = 0
        for x in range(cols):
            while z[j + 1] < x:
                j += 1
            d = x - v[j]
            out[r, x] = d * d + f[v[j]]
    return out


@nb.njit(cache=True, nogil=True)
def rasterize(polys, origin_x, origin_y, h, rows, cols, tol, mark_centroids):
    """Mark cells whose center lies in some closed counterclockwise convex polygon."""
    mask = np.zeros((rows, cols), dtype=np.bool_)
    n_poly, n_vert = polys.shape[0], polys.shape[1]
    nx = np.empty(n_vert)
    ny = np.empty(n_vert)
    off = np.empty(n_vert)
    for k in range(n_poly):
        xmin = polys[k, 0, 0]
        xmax = xmin
        ymin = polys[k, 0, 1]
        ymax = ymin
        cx = 0.0
        cy = 0.0
        for a in range(n_vert):
            x0 = polys[k, a, 0]
            y0 = polys[k, a, 1]
            b = (a + 1) % n_vert
            ex = polys[k, b, 0] - x0
            ey = polys[k, b, 1] - y0
            length = np.sqrt(ex * ex + ey * ey)
            if length == 0.0:
                length = 1.0
            nx[a] = ey / length
            ny[a] = -ex / length
            off[a] = nx[a] * x0 + ny[a] * y0
            xmin = min(xmin, x0)
            xmax = max(xmax, x0)
            ymin = min(ymin, y0)
            ymax = max(ymax, y0)
            cx += x0
            cy += y0
        i0 = max(int(np.floor((xmin - origin_x) / h - 0.5)), 0)
        i1 = min(int(np.ceil((xmax - origin_x) / h - 0.5)), cols - 1)
        j0 = max(int(np.floor((ymin - origin_y) / h - 0.5)), 0)
        j1 = min(int(np.ceil((ymax - origin_y) / h - 0.5)), rows - 1)
        for j in range(j0, j1 + 1):
            py = origin_y + (j + 0.5) * h
            for i in range(i0, i1 + 1):
                if mask[j, i]:
                    continue
                px = origin_x + (i + 0.5) * h
                inside = True
                for a in range(n_vert):
                    if nx[a] * px + ny[a] * py > off[a] + tol:
                        inside = False
                        break
                if inside:
                    mask[j, i] = True
        if mark_centroids:
            i = int(np.floor((cx / n_vert - origin_x) / h))
            j = int(np.floor((cy / n_vert - origin_y) / h))
            if 0 <= i < cols and 0 <= j < rows:
                mask[j, i] = True
    return mask


@nb.njit(cache=True, nogil=True)
def _crossing(va, vb, level):
    return (level - va) / (vb - va)


@nb.njit(cache=True, nogil=True)
def contour_length(values, level):
    """Total length (in cell units) of the marching-squares contour {values = level}.

    Inside means ``value <= level``. Saddle cells join the two inside corners
    when the mean of the four corner values is inside.
    """
    rows, cols = values.shape
    total = 0.0
    ex = np.empty(4)
    ey = np.empty(4)
    for y in range(rows - 1):
        for x in range(cols - 1):
            v0 = values[y, x]
            v1 = values[y, x + 1]
            v2 = values[y + 1, x + 1]
            v3 = values[y + 1, x]
            code = 0
            if v0 <= level:
                code |= 1
            if v1 <= level:
                code |= 2
            if v2 <= level:
                code |= 4
            if v3 <= level:
                code |= 8
            if code == 0 or code == 15:
                continue
            # edge points: e0 = c0c1, e1 = c1c2, e2 = c2c3, e3 = c3c0
            crossed = 0
            if (code & 1) != ((code >> 1) & 1):
                ex[0] = _crossing(v0, v1, level)
                ey[0] = 0.0
                crossed += 1
            if ((code >> 1) & 1) != ((code >> 2) & 1):
                ex[1] = 1.0
                ey[1] = _crossing(v1, v2, level)
                crossed += 1
            if ((code >> 2) & 1) != ((code >> 3) & 1):
                ex[2] = 1.0 - _crossing(v2, v3, level)
                ey[2] = 1.0
                crossed += 1
            if ((code >> 3) & 1) != (code & 1):
                ex[3] = 0.0
                ey[3] = 1.0 - _crossing(v3, v0, level)
                crossed += 1
            if crossed == 2:
                a = -1
                b = -1
                for e in range(4):
                    edge_crossed = ((code >> e) & 1) != ((code >> ((e + 1) % 4)) & 1)
                    if edge_crossed:
                        if a < 0:
                            a = e
                        else:
                            b = e
                total += np.sqrt((ex[a] - ex[b]) ** 2 + (ey[a] - ey[b]) ** 2)
                continue
            center_inside = 0.25 * (v0 + v1 + v2 + v3) <= level
            if (code == 5) == center_inside:
                total += np.sqrt((ex[0] - ex[1]) ** 2 + (ey[0] - ey[1]) ** 2)
                total += np.sqrt((ex[2] - ex[3]) ** 2 + (ey[2] - ey[3]) ** 2)
            else:
                total += np.sqrt((ex[3] - ex[0]) ** 2 + (ey[3] - ey[0]) ** 2)
                total += np.sqrt((ex[1] - ex[2]) ** 2 + (ey[1] - ey[2]) ** 2)
    return total
