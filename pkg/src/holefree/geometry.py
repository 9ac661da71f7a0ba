"""Exact rational geometric predicates.

Points are sequences of ``int`` or ``fractions.Fraction``.  Every predicate
first clears denominators (the sign of each test is invariant under a
common positive scaling) and then works on Python integers only.
"""
from __future__ import annotations

import itertools
from functools import cmp_to_key
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

Point = tuple


class DimensionError(ValueError):
    pass


def as_point(p) -> tuple:
    """Canonical exact point: a tuple of ints / Fractions."""
    out = []
    for c in p:
        if isinstance(c, int):
            out.append(c)
        elif isinstance(c, Fraction):
            out.append(c.numerator if c.denominator == 1 else c)
        elif isinstance(c, str):
            f = Fraction(c)
            out.append(f.numerator if f.denominator == 1 else f)
        else:
            f = Fraction(c)
            out.append(f.numerator if f.denominator == 1 else f)
    return tuple(out)


def _dim(points) -> int:
    dims = {len(p) for p in points}
    if len(dims) > 1:
        raise DimensionError(f"mixed dimensions {sorted(dims)}")
    return dims.pop() if dims else 0


def integerize(points: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Scale all points by the lcm of the denominators."""
    return integerize_with_scale(points)[0]


def integerize_with_scale(points: Sequence[Sequence]) -> tuple[list[tuple[int, ...]], int]:
    den = 1
    for p in points:
        for c in p:
            if isinstance(c, Fraction) and c.denominator != 1:
                den = lcm(den, c.denominator)
    if den == 1:
        return [tuple(int(c) for c in p) for p in points], 1
    return [tuple(int(c * den) for c in p) for p in points], den


def det(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i = A[i]
            row_k = A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rank(M: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(r) for r in M]
    if not A:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, rows):
            if A[i][c]:
                f, g = A[i][c], A[r][c]
                A[i] = [a * g - b * f for a, b in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def sign(v) -> int:
    return (v > 0) - (v < 0)


def orientation(pts: Sequence[Sequence]) -> int:
    """Sign of det(p_1 - p_0, ..., p_d - p_0) for d+1 points in R^d."""
    d = _dim(pts)
    if len(pts) != d + 1:
        raise DimensionError(f"orientation needs {d + 1} points in R^{d}, got {len(pts)}")
    P = integerize(pts)
    p0 = P[0]
    if d == 2:
        (ax, ay), (bx, by), (cx, cy) = P
        return sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    return sign(det([[a - b for a, b in zip(p, p0)] for p in P[1:]]))


def affine_dimension(S: Iterable[Sequence]) -> int:
    S = list(S)
    if not S:
        return -1
    _dim(S)
    P = integerize(S)
    p0 = P[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in P[1:]])


def _cross(vectors: Sequence[Sequence[int]], d: int) -> list[int]:
    """Generalised cross product of d-1 vectors in Z^d (cofactor vector)."""
    out = []
    for c in range(d):
        minor = [[v[k] for k in range(d) if k != c] for v in vectors]
        out.append((-1) ** c * det(minor))
    return out


def _positively_spans(V: list[tuple[int, ...]], d: int) -> bool:
    """True iff the integer vectors V positively span R^d.

    Candidate separating normals are cross products of d-1 vectors of V;
    V positively spans iff it spans and no candidate has all dot products
    of one sign (those candidates include every extreme ray of the dual
    cone).
    """
    if len(V) < d + 1:
        return False
    if d == 1:
        return any(v[0] > 0 for v in V) and any(v[0] < 0 for v in V)
    if d == 2:
        return _positively_spans_2d(V)
    if d == 3:
        A = np.array(V, dtype=object)
        ia, ib = np.triu_indices(len(V), 1)
        X, Y = A[ia], A[ib]
        C = np.stack(
            [
                X[:, 1] * Y[:, 2] - X[:, 2] * Y[:, 1],
                X[:, 2] * Y[:, 0] - X[:, 0] * Y[:, 2],
                X[:, 0] * Y[:, 1] - X[:, 1] * Y[:, 0],
            ],
            axis=1,
        )
    else:
        C = np.array(
            [_cross(c, d) for c in itertools.combinations(V, d - 1)], dtype=object
        )
        A = np.array(V, dtype=object)
    nz = np.array([any(x != 0 for x in row) for row in C], dtype=bool)
    if not nz.any():
        return False
    C = C[nz]
    D = C.dot(A.T)
    pos = (D > 0).any(axis=1)
    neg = (D < 0).any(axis=1)
    return bool(np.all(pos & neg))


def _positively_spans_2d(V) -> bool:
    """Angular sweep: V positively spans the plane iff every cyclic gap
    between consecutive distinct directions is below pi."""
    dirs = set()
    for v in V:
        g = gcd(v[0], v[1])
        if g:
            dirs.add((v[0] // g, v[1] // g))
    if len(dirs) < 3:
        return False

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(u, w):
        hu, hw = half(u), half(w)
        if hu != hw:
            return hu - hw
        c = u[0] * w[1] - u[1] * w[0]
        return -1 if c > 0 else (1 if c < 0 else 0)

    D = sorted(dirs, key=cmp_to_key(cmp))
    for u, w in zip(D, D[1:] + D[:1]):
        if u[0] * w[1] - u[1] * w[0] <= 0:
            return False
    return True


def interior_by_section(S: Sequence[Sequence], x: Sequence) -> bool:
    """Same answer as interior_contains, computed on the section of conv(S)
    by the hyperplane through x orthogonal to e_1.

    That section is the hull of the points of S on the hyperplane and of
    the crossings of segments joining points on opposite sides; x is
    interior iff S has points strictly on both sides and x is interior to
    the section.  Cheap for long thin sets such as lattice-line windows."""
    S = list(S)
    if not S:
        return False
    d = _dim(S + [x])
    P = integerize(S + [x])
    xi = P[-1]
    h = xi[0]
    left = [p for p in P[:-1] if p[0] < h]
    right = [p for p in P[:-1] if p[0] > h]
    if not left or not right:
        return False
    if d == 1:
        return True
    V = [tuple(a - b for a, b in zip(p[1:], xi[1:])) for p in P[:-1] if p[0] == h]
    for p in left:
        for q in right:
            w, t = q[0] - p[0], h - p[0]
            V.append(tuple(w * (pc - xc) + t * (qc - pc) for pc, qc, xc in zip(p[1:], q[1:], xi[1:])))
    V = [v for v in V if any(v)]
    if d == 2:
        return any(v[0] > 0 for v in V) and any(v[0] < 0 for v in V)
    if rank(V) < d - 1:
        return False
    return _positively_spans(V, d - 1)


def interior_contains(S: Sequence[Sequence], x: Sequence) -> bool:
    """Is x in the strict d-dimensional interior of conv(S)?"""
    S = list(S)
    if not S:
        return False
    d = _dim(S + [x])
    P = integerize(S + [x])
    xi = P[-1]
    V = [tuple(a - b for a, b in zip(p, xi)) for p in P[:-1]]
    V = [v for v in V if any(v)]
    if rank(V) < d:
        return False
    return _positively_spans(V, d)


class InteriorTester:
    """Facet description of conv(S) for repeated strict-interior queries.

    Works on integer points sharing one scale with the queries.  Facet
    planes are the hyperplanes through d affinely independent points of S
    with all of S on one side; x is interior iff it is strictly on the
    inner side of every one of them."""

    def __init__(self, S: Sequence[Sequence[int]]):
        S = [tuple(p) for p in S]
        self.d = len(S[0]) if S else 0
        self.full = bool(S) and affine_dimension(S) == self.d
        self.facets = []
        if not self.full:
            return
        d = self.d
        seen = set()
        for T in itertools.combinations(S, d):
            base = T[0]
            n = _cross([tuple(a - b for a, b in zip(q, base)) for q in T[1:]], d)
            if not any(n):
                continue
            off = sum(a * b for a, b in zip(n, base))
            vals = [sum(a * b for a, b in zip(n, q)) - off for q in S]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                n = [-a for a in n]
                off = -off
            else:
                continue
            g = 0
            for a in n:
                g = gcd(g, abs(a))
            key = (tuple(a // g for a in n), off // g if off % g == 0 else Fraction(off, g))
            if key not in seen:
                seen.add(key)
                self.facets.append((n, off))

    def __call__(self, x: Sequence[int]) -> bool:
        if not self.full:
            return False
        return all(sum(a * b for a, b in zip(n, x)) > off for n, off in self.facets)


def _direction_key(v: Sequence[int]) -> tuple:
    g = 0
    for c in v:
        g = gcd(g, c)
    v = tuple(c // g for c in v)
    for c in v:
        if c != 0:
            return v if c > 0 else tuple(-c for c in v)
    return v


def general_position(S: Sequence[Sequence]) -> bool:
    """No k+2 points of S in a common k-flat, for every k < d."""
    S = list(S)
    if not S:
        return True
    d = _dim(S)
    P = integerize(S)
    if len(P) <= d + 1:
        return affine_dimension(P) == len(P) - 1
    if len(set(P)) < len(P):
        return False
    if d == 1:
        return True
    if d == 2:
        for i, p in enumerate(P):
            seen = set()
            for q in P[i + 1:]:
                key = _direction_key((q[0] - p[0], q[1] - p[1]))
                if key in seen:
                    return False
                seen.add(key)
        return True
    if d == 3:
        # hash the plane through every triple; a repeat means 4 coplanar
        planes = set()
        for a, b, c in itertools.combinations(P, 3):
            u = [b[k] - a[k] for k in range(3)]
            v = [c[k] - a[k] for k in range(3)]
            n = (
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            )
            if n == (0, 0, 0):
                return False
            n = _direction_key(n)
            key = (n, sum(n[k] * a[k] for k in range(3)))
            if key in planes:
                return False
            planes.add(key)
        return True
    return all(orientation(c) != 0 for c in itertools.combinations(P, d + 1))


# --- generic pairs ---------------------------------------------------------


def _pair_dets(S: Sequence[Sequence[int]], T: Sequence[Sequence[int]]) -> tuple[int, int]:
    """(D, c) for integer point lists S, T with |S|+|T| = d+1.

    D = det[p, 1] over the rows S then T; c is the same determinant with the
    last coordinate replaced by the indicator of S.
    """
    rows_D = [list(p) + [1] for p in S] + [list(p) + [1] for p in T]
    rows_c = [list(p[:-1]) + [1, 1] for p in S] + [list(p[:-1]) + [0, 1] for p in T]
    return det(rows_D), det(rows_c)


def _check_pair(S, T):
    S, T = list(S), list(T)
    if not S or not T:
        raise ValueError("generic pair needs non-empty S and T")
    d = _dim(S + T)
    if len(S) + len(T) != d + 1:
        raise ValueError(f"|S|+|T| must be {d + 1}, got {len(S) + len(T)}")
    P = integerize(S + T)
    return P[: len(S)], P[len(S):]


def is_generic_pair(S: Sequence[Sequence], T: Sequence[Sequence]) -> bool:
    Si, Ti = _check_pair(S, T)
    return _pair_dets(Si, Ti)[1] != 0


def lies_above(S: Sequence[Sequence], T: Sequence[Sequence]) -> bool:
    """For a generic pair: does span(S) pass above span(T) at their common
    projection point?"""
    Si, Ti = _check_pair(S, T)
    D, c = _pair_dets(Si, Ti)
    if c == 0:
        raise ValueError("pair is not generic")
    return sign(D) == sign(c)


def intersection_heights(S, T) -> tuple[Fraction, Fraction, tuple]:
    """Direct rational solve: the points s in aff S and t in aff T sharing
    the first d-1 coordinates.  Returns (pi_d(s), pi_d(t), common projection).

    Independent of the determinant formulation; used as a cross-check.
    """
    S = [as_point(p) for p in S]
    T = [as_point(p) for p in T]
    d = len(S[0])
    # unknowns: lambda_1..lambda_{|S|-1}, mu_1..mu_{|T|-1}
    s0, t0 = S[0], T[0]
    cols = [[Fraction(s[k] - s0[k]) for k in range(d - 1)] for s in S[1:]]
    cols += [[Fraction(-(t[k] - t0[k])) for k in range(d - 1)] for t in T[1:]]
    rhs = [Fraction(t0[k] - s0[k]) for k in range(d - 1)]
    m = len(cols)
    A = [[cols[j][r] for j in range(m)] + [rhs[r]] for r in range(d - 1)]
    # Gauss-Jordan
    for c in range(m):
        piv = next(r for r in range(c, m) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [a / pv for a in A[c]]
        for r in range(m):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    sol = [A[r][m] for r in range(m)]
    lam, mu = sol[: len(S) - 1], sol[len(S) - 1:]
    s = [Fraction(s0[k]) + sum(l * (S[i + 1][k] - s0[k]) for i, l in enumerate(lam)) for k in range(d)]
    t = [Fraction(t0[k]) + sum(u * (T[i + 1][k] - t0[k]) for i, u in enumerate(mu)) for k in range(d)]
    return s[-1], t[-1], tuple(s[:-1])


# --- high above / deep below -------------------------------------------------


@dataclass
class PairWitness:
    S: tuple
    T: tuple


def _minor_table(rows: list[list[int]], size: int, ncols: int):
    """For every `size`-subset of rows, its minors over all `size`-subsets
    of columns.  Returns (row subsets, column subsets, object matrix)."""
    col_sets = list(itertools.combinations(range(ncols), size))
    row_sets = list(itertools.combinations(range(len(rows)), size))
    table = np.empty((len(row_sets), len(col_sets)), dtype=object)
    for a, rs in enumerate(row_sets):
        sub = [rows[r] for r in rs]
        for b, cs in enumerate(col_sets):
            table[a, b] = det([[row[c] for c in cs] for row in sub])
    return row_sets, col_sets, table


def _laplace_signs(col_sets, s, n):
    # rows 0..s-1 vs complement columns; sign of generalised Laplace term
    out = []
    row_sum = sum(range(1, s + 1))
    for cs in col_sets:
        out.append((-1) ** (row_sum + sum(c + 1 for c in cs)))
    return out


def _high_above_split(A, B, s, d, max_pairs):
    """All generic pairs with |S| = s from A, |T| = d+1-s from B.

    Returns (violation witness or None, number of pairs examined)."""
    t = d + 1 - s
    if len(A) < s or len(B) < t:
        return None, 0
    n = d + 1
    rowsA_D = [list(p) + [1] for p in A]
    rowsB_D = [list(p) + [1] for p in B]
    rowsA_c = [list(p[:-1]) + [1, 1] for p in A]
    rowsB_c = [list(p[:-1]) + [0, 1] for p in B]
    nS = _comb(len(A), s)
    nT = _comb(len(B), t)
    if max_pairs is not None and nS * nT > max_pairs:
        raise BudgetExceeded(f"{nS * nT} pairs exceed budget {max_pairs}")
    rsA, cols, MA_D = _minor_table(rowsA_D, s, n)
    _, _, MA_c = _minor_table(rowsA_c, s, n)
    rsB, colsB, MB_D = _minor_table(rowsB_D, t, n)
    _, _, MB_c = _minor_table(rowsB_c, t, n)
    # match each column subset of S with its complement in T
    idxB = {cs: k for k, cs in enumerate(colsB)}
    perm = [idxB[tuple(c for c in range(n) if c not in cs)] for cs in cols]
    sg = np.array(_laplace_signs(cols, s, n), dtype=object)
    LA_D = MA_D * sg
    LA_c = MA_c * sg
    RB_D = MB_D[:, perm]
    RB_c = MB_c[:, perm]
    chunk = max(1, 200000 // max(1, len(rsB)))
    for lo in range(0, len(rsA), chunk):
        Dm = LA_D[lo:lo + chunk].dot(RB_D.T)
        Cm = LA_c[lo:lo + chunk].dot(RB_c.T)
        bad = (Cm != 0) & ~(((Dm > 0) & (Cm > 0)) | ((Dm < 0) & (Cm < 0)))
        if bad.any():
            a, b = np.argwhere(bad)[0]
            return (rsA[lo + a], rsB[b]), nS * nT
    return None, nS * nT


def _comb(n, k):
    from math import comb

    return comb(n, k) if 0 <= k <= n else 0


class BudgetExceeded(RuntimeError):
    pass


def high_above_witness(A: Sequence[Sequence], B: Sequence[Sequence], max_pairs: int | None = None):
    """None if A lies high above B, else a violating PairWitness.

    Enumerates |S| = 1..d in order; raises BudgetExceeded when a split
    would need more than max_pairs pair evaluations.
    """
    A, B = list(A), list(B)
    if not A or not B:
        return None
    d = _dim(A + B)
    P = integerize(A + B)
    Ai, Bi = P[: len(A)], P[len(A):]
    for s in range(1, d + 1):
        w, _ = _high_above_split(Ai, Bi, s, d, max_pairs)
        if w is not None:
            rs, ts = w
            return PairWitness(tuple(A[i] for i in rs), tuple(B[i] for i in ts))
    return None


def high_above(A, B, max_pairs: int | None = None) -> bool:
    return high_above_witness(A, B, max_pairs) is None


def deep_below(B, A, max_pairs: int | None = None) -> bool:
    return high_above_witness(A, B, max_pairs) is None


def deep_below_2d(B: Sequence[Sequence], A: Sequence[Sequence]) -> bool:
    """Planar line-based test: B lies deep below A.

    Every line through two points of A with distinct x passes strictly
    above all of B, and every such line through B strictly below all of A.
    """
    P = integerize(list(A) + list(B))
    Ai, Bi = P[: len(A)], P[len(A):]

    def side_ok(X, Y, want):
        for (x1, y1), (x2, y2) in itertools.combinations(X, 2):
            if x1 == x2:
                continue
            if x1 > x2:
                x1, y1, x2, y2 = x2, y2, x1, y1
            for (x, y) in Y:
                # sign of y - line(x), scaled by (x2 - x1) > 0
                v = (y - y1) * (x2 - x1) - (y2 - y1) * (x - x1)
                if sign(v) != want:
                    return False
        return True

    return side_ok(Ai, Bi, -1) and side_ok(Bi, Ai, +1)


# --- negligibility ------------------------------------------------------------


@dataclass
class NegligibleResult:
    ok: bool
    violations: list = field(default_factory=list)
    checked: int = 0

    def __bool__(self):
        return self.ok


def negligible_on(domain: Sequence[Sequence], image: Sequence[Sequence],
                  subsets: Iterable[Sequence[int]]) -> NegligibleResult:
    """Check f(x) in Int conv f(S) whenever x in Int conv S, for the given
    index subsets S of the domain.  f is domain[i] -> image[i]."""
    if len(domain) != len(image):
        raise ValueError("bijection sides differ in size")
    if len({as_point(p) for p in domain}) != len(domain):
        raise ValueError("domain has repeated points")
    dom = integerize(domain)
    img = integerize(image)
    viol = []
    checked = 0
    for sub in subsets:
        sub = tuple(sub)
        S = [dom[i] for i in sub]
        fS = [img[i] for i in sub]
        for x in range(len(dom)):
            if interior_contains(S, dom[x]):
                checked += 1
                if not interior_contains(fS, img[x]):
                    viol.append((sub, x))
    return NegligibleResult(not viol, viol, checked)
