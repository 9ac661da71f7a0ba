"""Hole detection: largest empty convex polygon, literal hole-freeness,
bounded higher-dimensional search and spread."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import comb, isqrt
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import (
    _dim,
    affine_dimension,
    as_point,
    det,
    integerize,
    integerize_with_scale,
    interior_contains,
    rank,
    sign,
)


@dataclass
class HoleReport:
    largest_size: int
    witness: list
    emptiness_certificate: str
    method: str
    is_lower_bound: bool = False
    extra: dict = field(default_factory=dict)


@dataclass
class SpreadValue:
    max_sq_dist: Fraction
    min_sq_dist: Fraction
    ratio_sq: Fraction


# --- symbolic planar orientation -------------------------------------------


class SymbolicPlane:
    """Planar points with a simulated-perturbation orientation.

    Points are relabelled by descending (y, x); label m is moved by
    (eps^(2^(2m-1)), eps^(2^(2m-2))) for an infinitesimal eps.  For sorted
    labels u < v < w the perturbed determinant is decided by the first
    nonzero term of: det, x_w - x_v, y_v - y_w, x_u - x_w, 1.
    """

    def __init__(self, points: Sequence[Sequence]):
        pts = integerize([as_point(p) for p in points]) if points else []
        self.order = sorted(range(len(pts)), key=lambda i: (pts[i][1], pts[i][0]), reverse=True)
        self.P = [pts[i] for i in self.order]
        self.n = len(self.P)

    def orient(self, i: int, j: int, k: int) -> int:
        P = self.P
        a, b, c = P[i], P[j], P[k]
        D = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if D:
            return 1 if D > 0 else -1
        return self._tie(i, j, k)

    def _tie(self, i, j, k):
        s = 1
        # bubble sort three labels tracking parity
        if i > j:
            i, j, s = j, i, -s
        if j > k:
            j, k, s = k, j, -s
        if i > j:
            i, j, s = j, i, -s
        P = self.P
        for v in (P[k][0] - P[j][0], P[j][1] - P[k][1], P[i][0] - P[k][0]):
            if v:
                return s if v > 0 else -s
        return s

    def table(self) -> np.ndarray:
        n = self.n
        T = np.zeros((n, n, n), dtype=np.int8)
        for i, j, k in itertools.combinations(range(n), 3):
            o = self.orient(i, j, k)
            for (a, b, c), par in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                                   ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
                T[a, b, c] = o * par
        return T


# --- cubic dynamic program ---------------------------------------------------


def _largest_from_anchor(sp: SymbolicPlane, a: int, best: int):
    orient = sp.orient
    q = list(range(a))  # points above the anchor
    if len(q) < 2:
        return best, None
    q.sort(key=cmp_to_key(lambda u, v: -1 if orient(a, u, v) > 0 else 1))
    m = len(q)
    Q = [[] for _ in range(m)]
    head = [0] * m
    ins = [[] for _ in range(m)]
    outs = [[] for _ in range(m)]
    # visibility graph of empty triangles (a, q_i, q_j)
    for start in range(m - 1):
        stack = [(start, start + 1)]
        while stack:
            i, j = stack[-1]
            Qi = Q[i]
            if head[i] < len(Qi) and orient(q[Qi[head[i]]], q[i], q[j]) > 0:
                f = Qi[head[i]]
                head[i] += 1
                stack.append((f, j))
            else:
                outs[i].append(j)
                ins[j].append(i)
                Q[j].append(i)
                stack.pop()
    L = {}
    pred = {}
    found = None
    for i in range(m):
        if not outs[i]:
            continue
        qi = q[i]
        angle = cmp_to_key(lambda u, v: -1 if orient(qi, q[u], q[v]) > 0 else 1)
        outs_s = sorted(outs[i], key=angle)
        ins_s = sorted(ins[i], key=angle)
        ptr = 0
        run, run_k = 0, None
        for j in outs_s:
            while ptr < len(ins_s) and orient(qi, q[j], q[ins_s[ptr]]) > 0:
                k = ins_s[ptr]
                if L[(k, i)] > run:
                    run, run_k = L[(k, i)], k
                ptr += 1
            if run + 1 > 3:
                L[(i, j)] = run + 1
                pred[(i, j)] = run_k
            else:
                L[(i, j)] = 3
                pred[(i, j)] = None
            if L[(i, j)] > best:
                best = L[(i, j)]
                found = (i, j)
    if found is None:
        return best, None
    chain = [found[1], found[0]]
    e = found
    while pred[e] is not None:
        k = pred[e]
        chain.append(k)
        e = (k, e[0])
    chain.reverse()
    return best, [a] + [q[c] for c in chain]


def largest_empty_convex_polygon_2d(P: Sequence[Sequence]) -> HoleReport:
    """Largest subset of P in convex position with no point of P strictly
    inside its hull.  Collinear ties are resolved symbolically."""
    pts = [as_point(p) for p in P]
    if pts and _dim(pts) != 2:
        raise ValueError("planar point set required")
    sp = SymbolicPlane(pts)
    n = sp.n
    if n <= 2:
        return HoleReport(n, list(pts), "trivial", "dp2d")
    best, witness = 2, [0, 1]
    for a in range(n):
        b, w = _largest_from_anchor(sp, a, best)
        if w is not None:
            best, witness = b, w
    wit = [pts[sp.order[i]] for i in witness]
    cert = _verify_planar_witness(sp, witness, pts)
    return HoleReport(best, wit, cert, "dp2d")


def _verify_planar_witness(sp: SymbolicPlane, labels: list[int], pts) -> str:
    """Re-check a witness: symbolic convex position and no interior point
    (the latter exactly, without perturbation)."""
    k = len(labels)
    for t in range(k):
        u, v = labels[t], labels[(t + 1) % k]
        for w in labels:
            if w not in (u, v) and sp.orient(u, v, w) <= 0:
                raise AssertionError("witness not in convex position")
    wit = [pts[sp.order[i]] for i in labels]
    for i, p in enumerate(pts):
        if interior_contains(wit, p):
            raise AssertionError("witness hull contains a point")
    return f"verified: convex position, {len(pts)} points checked outside interior"


def brute_force_largest_empty_2d(P: Sequence[Sequence]) -> tuple[int, list]:
    """Exhaustive oracle under the same symbolic tie-break.

    Empty convex polygons are closed under taking subsets of size >= 3, so
    a depth-first growth over increasing labels enumerates all of them.
    """
    pts = [as_point(p) for p in P]
    sp = SymbolicPlane(pts)
    n = sp.n
    if n <= 2:
        return n, list(pts)
    T = sp.table()
    best, best_set = 2, [0, 1]

    def empty_convex(X):
        k = len(X)
        edges = 0
        hull = []
        for u in X:
            for v in X:
                if u != v and all(T[u, v, w] > 0 for w in X if w != u and w != v):
                    edges += 1
                    hull.append((u, v))
        if edges != k:
            return False
        inX = set(X)
        for p in range(n):
            if p not in inX and all(T[u, v, p] > 0 for u, v in hull):
                return False
        return True

    stack = [[i, j, k] for i, j, k in itertools.combinations(range(n), 3)]
    stack = [X for X in stack if empty_convex(X)]
    while stack:
        X = stack.pop()
        if len(X) > best:
            best, best_set = len(X), X
        for z in range(X[-1] + 1, n):
            Y = X + [z]
            if empty_convex(Y):
                stack.append(Y)
    return best, [pts[sp.order[i]] for i in best_set]


def brute_force_largest_empty_2d_masks(P: Sequence[Sequence]) -> int:
    """Mask enumeration over the orientation table (numba kernel when
    available).  Exponential; intended for |P| <= 16."""
    sp = SymbolicPlane([as_point(p) for p in P])
    if sp.n <= 2:
        return sp.n
    return int(kernels.largest_empty_masks(sp.table()))


# --- literal hole-freeness -------------------------------------------------


def is_hole_free(P: Sequence[Sequence], ell: int, convex_witness_only: bool = False,
                 cap: int = 2_000_000):
    """Every ell-subset must have a point of P in the interior of its hull.

    Returns (True, None) or (False, violating subset).  Raises RuntimeError
    (indeterminate) when C(|P|, ell) exceeds cap.
    """
    pts = [as_point(p) for p in P]
    if len(pts) < ell:
        return True, None
    if comb(len(pts), ell) > cap:
        raise RuntimeError(f"indeterminate: C({len(pts)},{ell}) exceeds cap {cap}")
    d = _dim(pts)
    Pi = integerize(pts)
    for A in itertools.combinations(range(len(Pi)), ell):
        S = [Pi[i] for i in A]
        if affine_dimension(S) < d:
            if convex_witness_only:
                continue
            return False, [pts[i] for i in A]
        if convex_witness_only and not _convex_position(S):
            continue
        if not any(interior_contains(S, x) for x in Pi):
            return False, [pts[i] for i in A]
    return True, None


def in_closed_hull(V: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    """x in conv(V) (closed), exact; integer inputs."""
    V = [tuple(v) for v in V]
    if not V:
        return False
    if tuple(x) in V:
        return True
    base = V[0]
    diffs = [[a - b for a, b in zip(v, base)] for v in V[1:]]
    k = rank(diffs) if diffs else 0
    if rank(diffs + [[a - b for a, b in zip(x, base)]]) != k:
        return False
    if k == 0:
        return False
    d = len(x)
    # coordinates on which the k-flat projects injectively
    cols = None
    for cs in itertools.combinations(range(d), k):
        if rank([[r[c] for c in cs] for r in diffs]) == k:
            cols = cs
            break
    Vp = [tuple(v[c] for c in cols) for v in V]
    xp = tuple(x[c] for c in cols)
    for simplex in itertools.combinations(Vp, k + 1):
        M = [list(s) + [1] for s in simplex]
        D = det(M)
        if D == 0:
            continue
        ok = True
        for t in range(k + 1):
            Mt = [row[:] for row in M]
            Mt[t] = list(xp) + [1]
            if sign(det(Mt)) * sign(D) < 0:
                ok = False
                break
        if ok:
            return True
    return False


def _convex_position(S: Sequence[Sequence[int]]) -> bool:
    return all(not in_closed_hull(S[:i] + S[i + 1:], S[i]) for i in range(len(S)))


# --- higher dimensions --------------------------------------------------------


def _is_empty_convex(X, Pi) -> bool:
    if not _convex_position(X):
        return False
    return not any(interior_contains(X, p) for p in Pi if p not in X)


def empirical_largest_hole_hd(P: Sequence[Sequence], cap_size: int = 12, budget: int = 200,
                              seed: int = 0) -> HoleReport:
    """Greedy growth of empty convex polytopes; a verified lower bound.

    Seeds are the points themselves (growing by distance to the seed) and
    then seeded random orders until the budget of growth runs is spent.
    """
    pts = [as_point(p) for p in P]
    if not pts:
        return HoleReport(0, [], "empty set", "heuristic-verified", True)
    d = _dim(pts)
    Pi = integerize(pts)
    n = len(Pi)
    best: list[int] = [0]
    rng = random.Random(seed)

    def grow(order):
        X: list[int] = []
        for z in order:
            if len(X) >= cap_size:
                break
            Y = X + [z]
            S = [Pi[i] for i in Y]
            if len(Y) <= d:
                if affine_dimension(S) == len(Y) - 1:
                    X = Y
                continue
            if affine_dimension(S) < d:
                if _convex_position(S):
                    X = Y
                continue
            if _is_empty_convex(S, Pi):
                X = Y
        return X

    runs = 0
    for s in range(n):
        if runs >= budget:
            break
        c = Pi[s]
        order = sorted(range(n), key=lambda i: (sum((a - b) ** 2 for a, b in zip(Pi[i], c)), i))
        X = grow(order)
        runs += 1
        if len(X) > len(best) and affine_dimension([Pi[i] for i in X]) == d:
            best = X
    while runs < budget:
        order = list(range(n))
        rng.shuffle(order)
        X = grow(order)
        runs += 1
        if len(X) > len(best) and affine_dimension([Pi[i] for i in X]) == d:
            best = X
    W = [Pi[i] for i in best]
    if len(best) >= d + 1:
        assert _is_empty_convex(W, Pi)
        size = len(best)
    else:
        size = min(n, d) if affine_dimension(Pi) < d else len(best)
    return HoleReport(size, [pts[i] for i in best], "verified exactly", "heuristic-verified", True)


# --- spread -------------------------------------------------------------------


def spread(P: Sequence[Sequence]) -> SpreadValue:
    pts = [as_point(p) for p in P]
    if len(pts) < 2:
        raise ValueError("spread needs at least two points")
    Pi, den = integerize_with_scale(pts)
    A = np.array(Pi, dtype=object)
    mx, mn = None, None
    for i in range(len(Pi) - 1):
        diff = A[i + 1:] - A[i]
        sq = (diff * diff).sum(axis=1)
        lo, hi = sq.min(), sq.max()
        mx = hi if mx is None or hi > mx else mx
        mn = lo if mn is None or lo < mn else mn
    scale = den * den
    return SpreadValue(Fraction(mx, scale), Fraction(mn, scale), Fraction(mx, mn) if mn else None)


def spread_bound_holds(value: SpreadValue, n: int, eps: Fraction) -> bool:
    """ratio_sq <= (sqrt(2)(n-1) + 2 eps)^2 / (1 - 2 eps)^2, decided exactly.

    Expands to X <= 4 sqrt(2) (n-1) eps with X rational.
    """
    eps = Fraction(eps)
    X = value.ratio_sq * (1 - 2 * eps) ** 2 - 2 * (n - 1) ** 2 - 4 * eps * eps
    c = 4 * (n - 1) * eps
    if X <= 0:
        return True
    return X * X <= 2 * c * c
