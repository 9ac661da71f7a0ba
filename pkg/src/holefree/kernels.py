"""Small-integer kernels with numba acceleration.

These run only on int64-safe inputs (or on precomputed sign tables), so
they never change an exact answer.  With numba unavailable or disabled the
same Python source runs uninterpreted, or a numpy equivalent is used.
"""
from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, INT64_SAFE_BITS, njit


@njit(cache=True)
def _largest_empty_masks(T):
    n = T.shape[0]
    best = min(n, 2)
    idx = np.empty(n, dtype=np.int64)
    eu = np.empty(n, dtype=np.int64)
    ev = np.empty(n, dtype=np.int64)
    for mask in range(1, 1 << n):
        k = 0
        for i in range(n):
            if (mask >> i) & 1:
                idx[k] = i
                k += 1
        if k < 3 or k <= best:
            continue
        # hull edges: ordered pairs with every other member strictly left
        ne = 0
        for a in range(k):
            for b in range(k):
                if a == b:
                    continue
                u = idx[a]
                v = idx[b]
                ok = True
                for c in range(k):
                    if c != a and c != b and T[u, v, idx[c]] <= 0:
                        ok = False
                        break
                if ok:
                    eu[ne] = u
                    ev[ne] = v
                    ne += 1
                    if ne > k:
                        break
            if ne > k:
                break
        if ne != k:
            continue
        empty = True
        for p in range(n):
            if (mask >> p) & 1:
                continue
            inside = True
            for e in range(ne):
                if T[eu[e], ev[e], p] <= 0:
                    inside = False
                    break
            if inside:
                empty = False
                break
        if empty:
            best = k
    return best


def largest_empty_masks(T: np.ndarray) -> int:
    """Largest empty convex subset by exhaustive mask enumeration over an
    orientation sign table T[i, j, k]."""
    return int(_largest_empty_masks(np.ascontiguousarray(T, dtype=np.int8)))


@njit(cache=True)
def _orient_batch(P, tri):
    out = np.empty(tri.shape[0], dtype=np.int8)
    for t in range(tri.shape[0]):
        a = tri[t, 0]
        b = tri[t, 1]
        c = tri[t, 2]
        v = (P[b, 0] - P[a, 0]) * (P[c, 1] - P[a, 1]) - (P[b, 1] - P[a, 1]) * (P[c, 0] - P[a, 0])
        out[t] = 1 if v > 0 else (-1 if v < 0 else 0)
    return out


def _orient_batch_numpy(P, tri):
    a, b, c = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    v = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return np.sign(v).astype(np.int8)


def int64_safe(points) -> bool:
    return all(abs(int(c)) < (1 << INT64_SAFE_BITS) for p in points for c in p)


def orient_batch(points, triples, use_numba: bool | None = None) -> np.ndarray:
    """Planar orientation signs for index triples of integer points.

    Falls back to exact Python integers when coordinates are too large for
    int64 products."""
    tri = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    if not int64_safe(points):
        return _orient_exact(points, tri)
    P = np.asarray(points, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _orient_batch(P, tri)
    return _orient_batch_numpy(P, tri)


def _orient_exact(points, tri):
    out = np.empty(len(tri), dtype=np.int8)
    for t, (a, b, c) in enumerate(tri.tolist()):
        pa, pb, pc = points[a], points[b], points[c]
        v = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        out[t] = (v > 0) - (v < 0)
    return out


@njit(cache=True)
def _box_interior_scan(P, hull_u, hull_v, lo0, hi0, lo1, hi1):
    # lattice points strictly left of every CCW hull edge
    for x in range(lo0, hi0 + 1):
        for y in range(lo1, hi1 + 1):
            inside = True
            for e in range(hull_u.shape[0]):
                a = hull_u[e]
                b = hull_v[e]
                v = (P[b, 0] - P[a, 0]) * (y - P[a, 1]) - (P[b, 1] - P[a, 1]) * (x - P[a, 0])
                if v <= 0:
                    inside = False
                    break
            if inside:
                return x, y, True
    return 0, 0, False


def box_interior_scan(P: np.ndarray, hull: list[int]):
    """First lattice point strictly inside the convex polygon with CCW
    vertex indices ``hull`` (int64-safe coordinates), or None."""
    P = np.asarray(P, dtype=np.int64)
    hu = np.array(hull, dtype=np.int64)
    hv = np.roll(hu, -1)
    x, y, ok = _box_interior_scan(P, hu, hv, int(P[:, 0].min()), int(P[:, 0].max()),
                                  int(P[:, 1].min()), int(P[:, 1].max()))
    return (int(x), int(y)) if ok else None
