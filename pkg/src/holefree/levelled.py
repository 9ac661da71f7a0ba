"""Levelled sets, residue slices, lattice flats, flag frames and the
lattice tools (cube reduction, pigeonhole cube finder, planar
classification, spread checks)."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import (
    _dim,
    affine_dimension,
    as_point,
    integerize,
    interior_contains,
    rank,
)


# --- levelled sets ------------------------------------------------------------


@dataclass
class LevelledSet:
    """A finite point family with an affine level map phi(x) = c.x + b."""

    points: list
    coeffs: tuple
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        self.points = [as_point(p) for p in self.points]
        self.coeffs = tuple(Fraction(c) for c in self.coeffs)
        self.offset = Fraction(self.offset)
        if not any(self.coeffs):
            raise ValueError("level map must be surjective (nonzero coefficients)")
        for p in self.points:
            if len(p) != len(self.coeffs):
                raise ValueError("point dimension does not match the level map")
            if self.level(p).denominator != 1:
                raise ValueError(f"level of {p} is not an integer")

    @classmethod
    def along_axis(cls, points, axis: int = 0, a=1, b=0, d: int | None = None):
        d = d if d is not None else len(points[0])
        c = [0] * d
        c[axis] = a
        return cls(list(points), tuple(c), Fraction(b))

    @property
    def d(self) -> int:
        return len(self.coeffs)

    def level(self, p) -> Fraction:
        return sum((c * x for c, x in zip(self.coeffs, p)), self.offset)

    def levels(self) -> list[int]:
        return [int(self.level(p)) for p in self.points]

    def with_points(self, pts) -> "LevelledSet":
        return LevelledSet(list(pts), self.coeffs, self.offset)

    def __len__(self):
        return len(self.points)

    def fingerprint(self) -> tuple:
        return (tuple(sorted(self.points)), self.coeffs, self.offset)


def residue_slice(L: LevelledSet, a: int, p: int) -> LevelledSet:
    """Points with level = a mod p, re-levelled by (phi - a)/p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    pts = [q for q, lv in zip(L.points, L.levels()) if (lv - a) % p == 0]
    out = LevelledSet.__new__(LevelledSet)
    out.points = pts
    out.coeffs = tuple(c / p for c in L.coeffs)
    out.offset = (L.offset - a) / p
    return out


# --- integer lattice helpers --------------------------------------------------


def _ext_gcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def integer_kernel(A: Sequence[Sequence[int]], d: int) -> list[list[int]]:
    """Z-basis of {x in Z^d : A x = 0} by unimodular column operations."""
    A = [list(r) for r in A]
    U = [[int(i == j) for j in range(d)] for i in range(d)]  # columns of U
    cols = [[row[j] for row in A] for j in range(d)]
    piv = 0
    for r in range(len(A)):
        # make cols[piv..][r] have a single nonzero at piv
        for j in range(piv + 1, d):
            a, b = cols[piv][r], cols[j][r]
            if b == 0:
                continue
            g, x, y = _ext_gcd(a, b)
            pa, pb = a // g, b // g
            ci, cj = cols[piv], cols[j]
            ui, uj = U[piv], U[j]
            cols[piv] = [x * s + y * t for s, t in zip(ci, cj)]
            cols[j] = [-pb * s + pa * t for s, t in zip(ci, cj)]
            U[piv] = [x * s + y * t for s, t in zip(ui, uj)]
            U[j] = [-pb * s + pa * t for s, t in zip(ui, uj)]
        if piv < d and cols[piv][r] != 0:
            piv += 1
        if piv == d:
            break
    return [U[j] for j in range(piv, d)]


def saturated_basis(vectors: Sequence[Sequence], d: int) -> list[list[int]]:
    """Z-basis of span(vectors) intersected with Z^d."""
    V = integerize([as_point(v) for v in vectors]) if vectors else []
    V = [list(v) for v in V if any(v)]
    r = rank(V) if V else 0
    if r == 0:
        return []
    if r == d:
        return [[int(i == j) for j in range(d)] for i in range(d)]
    perp = integer_kernel(V, d)
    return integer_kernel(perp, d)


def solve_rational(M: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Solve M x = b exactly (M square or overdetermined, full column rank)."""
    rows = len(M)
    n = len(M[0])
    A = [[Fraction(x) for x in M[i]] + [Fraction(b[i])] for i in range(rows)]
    r = 0
    pivcol = []
    for c in range(n):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            return None
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivcol.append(c)
        r += 1
    if any(A[i][n] != 0 for i in range(r, rows)):
        return None
    return [A[i][n] for i in range(n)]


# --- flats and flag frames ------------------------------------------------------


@dataclass
class AffineSubspace:
    base: tuple
    basis: list

    def __post_init__(self):
        self.base = as_point(self.base)
        self.basis = [as_point(v) for v in self.basis]

    @property
    def d(self) -> int:
        return len(self.base)

    @property
    def k(self) -> int:
        return rank(integerize(self.basis)) if self.basis else 0

    def contains(self, x) -> bool:
        diff = [Fraction(a) - Fraction(b) for a, b in zip(x, self.base)]
        M = integerize([as_point(v) for v in self.basis] + [as_point(diff)]) if self.basis else None
        if not self.basis:
            return not any(diff)
        return rank(M[:-1]) == rank(M)


def flat_points(box: Sequence[int], V: AffineSubspace):
    """Integer points of [n_1] x ... x [n_d] on V, with a Z-basis of the
    direction lattice of V intersected with Z^d."""
    if any(x is not None and not isinstance(x, (int, Fraction)) for v in V.basis for x in v):
        raise ValueError("V must be rational")
    d = len(box)
    pts = [p for p in itertools.product(*[range(1, n + 1) for n in box]) if V.contains(p)]
    return pts, saturated_basis(V.basis, d)


@dataclass
class FlagFrame:
    V: AffineSubspace
    i: int  # pivot axis, 1-based
    j_indices: list  # j_{k+1} < ... < j_d, 1-based
    matrix_inv: list  # rational d x d, phi(y) = Minv (y - base) + shift
    shift: tuple
    v_offset: tuple

    def phi(self, y) -> tuple:
        diff = [Fraction(a) - Fraction(b) for a, b in zip(y, self.V.base)]
        out = []
        for r, row in enumerate(self.matrix_inv):
            out.append(sum((m * x for m, x in zip(row, diff)), Fraction(0)) + self.shift[r])
        return tuple(v.numerator if v.denominator == 1 else v for v in out)


def _invert(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def make_flag_frame(V: AffineSubspace, box: Sequence[int] | None = None,
                    v_offset: Sequence | None = None) -> FlagFrame:
    """Pivot axis, jump indices and the affine iso phi_V of a flat.

    phi_V sends V onto R^k with pi_1(phi_V(x)) = pi_i(x), then
    e_{j_l} to e_l for the jump indices."""
    d = V.d
    B = [list(map(Fraction, v)) for v in V.basis]
    k = rank(integerize(V.basis)) if B else 0
    if k < 1:
        raise ValueError("degenerate V")
    piv = next((a for a in range(d) if any(v[a] != 0 for v in B)), None)
    # direction basis b_1 with pi_i(b_1) = 1, the others with pi_i = 0
    lead = next(v for v in B if v[piv] != 0)
    b1 = [x / lead[piv] for x in lead]
    rest = []
    for v in B:
        w = [x - v[piv] * y for x, y in zip(v, b1)]
        if any(w) and rank(integerize([as_point(u) for u in rest + [w]])) == len(rest) + 1:
            rest.append(w)
    dirs = [b1] + rest[: k - 1]
    jumps = []
    cur = [as_point(v) for v in dirs]
    for j in range(d):
        e = tuple(int(t == j) for t in range(d))
        if rank(integerize(cur + [e])) > rank(integerize(cur)):
            cur.append(e)
            jumps.append(j + 1)
    cols = dirs + [[Fraction(int(t == j - 1)) for t in range(d)] for j in jumps]
    M = [[cols[c][r] for c in range(d)] for r in range(d)]
    Minv = _invert(M)
    shift = tuple([Fraction(V.base[piv])] + [Fraction(0)] * (d - 1))
    off = tuple(v_offset) if v_offset is not None else tuple([0] * d)
    return FlagFrame(V, piv + 1, jumps, Minv, shift, off)


# --- cubes ---------------------------------------------------------------------


@dataclass
class Cube:
    origin: tuple
    basis: list
    length: int

    def __post_init__(self):
        self.origin = tuple(int(x) for x in self.origin)
        self.basis = [tuple(int(x) for x in v) for v in self.basis]

    @property
    def d(self) -> int:
        return len(self.origin)

    def determinant(self) -> int:
        from .geometry import det

        return det([list(v) for v in self.basis])

    @property
    def is_basic(self) -> bool:
        return abs(self.determinant()) == 1

    def corners(self) -> list[tuple]:
        out = []
        for sel in itertools.product((0, self.length), repeat=self.d):
            out.append(tuple(self.origin[t] + sum(s * v[t] for s, v in zip(sel, self.basis))
                             for t in range(self.d)))
        return out

    def points(self) -> list[tuple]:
        out = []
        for sel in itertools.product(range(self.length + 1), repeat=self.d):
            out.append(tuple(self.origin[t] + sum(s * v[t] for s, v in zip(sel, self.basis))
                             for t in range(self.d)))
        return out


def cube_coefficients(c: Cube, x) -> list[Fraction]:
    """Coordinates of x - origin in the cube basis."""
    M = [[c.basis[j][i] for j in range(c.d)] for i in range(c.d)]
    return solve_rational(M, [Fraction(a) - b for a, b in zip(x, c.origin)])


def basic_cube_reduce(c: Cube) -> Cube:
    """A basic cube of length floor(r/d), same origin, inside conv(c).

    Generators u_k of the flag L_k = span(v_1..v_k) cap Z^d are taken with
    u_k = sum_i c_ki v_i, c_kk > 0 and 0 <= c_ki < 1 for i < k."""
    d = c.d
    if c.determinant() == 0:
        raise ValueError("degenerate cube basis")
    V = [list(v) for v in c.basis]
    Mcols = [[V[j][i] for j in range(d)] for i in range(d)]
    us: list[list[int]] = []
    coeff_rows = []
    for k in range(1, d + 1):
        Lk = saturated_basis(V[:k], d)
        coefs = [solve_rational(Mcols, b) for b in Lk]
        # image of L_k in the v_k coordinate is a cyclic group; find its generator
        lastc = [cf[k - 1] for cf in coefs]
        den = 1
        for q in lastc:
            den = lcm(den, q.denominator)
        ints = [int(q * den) for q in lastc]
        g, z = ints[0], [1] + [0] * (len(ints) - 1)
        for t in range(1, len(ints)):
            g2, x, y = _ext_gcd(g, ints[t])
            z = [x * zz for zz in z]
            z[t] = y
            g = g2
        if g < 0:
            g, z = -g, [-zz for zz in z]
        u = [sum(zz * b[i] for zz, b in zip(z, Lk)) for i in range(d)]
        cf = solve_rational(Mcols, u)
        # fractional parts for earlier coefficients
        for i in range(k - 1):
            fl = cf[i].numerator // cf[i].denominator
            if fl:
                u = [a - fl * b for a, b in zip(u, V[i])]
        cf = solve_rational(Mcols, u)
        if cf[k - 1] <= 0 or any(not (0 <= cf[i] < 1) for i in range(k - 1)):
            raise AssertionError("flag generator normalisation failed")
        us.append(u)
        coeff_rows.append(cf)
    out = Cube(c.origin, us, c.length // d)
    if not out.is_basic:
        raise AssertionError("reduced basis is not unimodular")
    for corner in out.corners():
        cf = cube_coefficients(c, corner)
        if any(x < 0 or x > c.length for x in cf):
            raise AssertionError("reduced cube leaves the input hull")
    return out


@dataclass
class HyperplaneCertificate:
    normal: tuple
    offset: int
    points: list


def _hyperplane_through(points: Sequence[tuple], d: int):
    """Integer normal and offset of a hyperplane containing the (flat)
    point set."""
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    ker = integer_kernel(diffs, d) if diffs else [[int(i == 0) for i in range(d)]]
    n = ker[0]
    return tuple(n), sum(a * b for a, b in zip(n, base))


def find_basic_cube(S: Sequence[Sequence[int]], r: int, m: int, d: int):
    """Either >= m points of S on one hyperplane or a basic cube of length r
    with every corner in Int conv S (both re-verified)."""
    S = [tuple(int(x) for x in p) for p in S]
    if not (m > d >= 2) or r < 1:
        raise ValueError("need m > d >= 2 and r >= 1")
    need = m * (r + 1) ** d * d ** (2 * d)
    if len(S) < need:
        raise ValueError(f"|S| = {len(S)} below threshold {need}")
    p = r * d * d + 2 * d
    classes: dict[tuple, list] = {}
    for q in S:
        classes.setdefault(tuple(x % p for x in q), []).append(q)
    T = max(classes.values(), key=lambda c: (len(c), sorted(c)))
    if affine_dimension(T) < d:
        n, off = _hyperplane_through(T, d)
        on = [q for q in S if sum(a * b for a, b in zip(n, q)) == off]
        if len(on) < m:
            raise AssertionError("hyperplane branch produced too few points")
        return HyperplaneCertificate(n, off, on)
    a = T[0]
    simplex = [a]
    for q in T[1:]:
        if affine_dimension(simplex + [q]) == len(simplex):
            simplex.append(q)
        if len(simplex) == d + 1:
            break
    vs = [tuple((x - y) // p for x, y in zip(q, a)) for q in simplex[1:]]
    length = (p // d) - 2
    origin = tuple(a[t] + sum(v[t] for v in vs) for t in range(d))
    cube = basic_cube_reduce(Cube(origin, vs, length))
    if cube.length != r:
        raise AssertionError("cube length mismatch")
    for corner in cube.corners():
        if not interior_contains(simplex, corner):
            raise AssertionError("cube corner not interior")
    return cube


# --- planar classification ---------------------------------------------------------


@dataclass
class InteriorLatticePoint:
    point: tuple


@dataclass
class TwoParallelLines:
    # each line as (a, b, c) with a x + b y = c
    line1: tuple
    line2: tuple


class InternalInconsistency(RuntimeError):
    pass


def convex_hull_2d(P: Sequence[tuple]) -> list[tuple]:
    """Strict convex hull (CCW, collinear points dropped), monotone chain."""
    pts = sorted(set(P))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _primitive(v):
    g = gcd(*v)
    return tuple(x // g for x in v)


def classify_interior_or_two_lines(S: Sequence[Sequence[int]]):
    S = [tuple(int(x) for x in p) for p in S]
    if len(S) < 7:
        raise ValueError("need at least 7 points")
    hull = convex_hull_2d(S)
    if len(hull) >= 3:
        if kernels.int64_safe(hull):
            hit = kernels.box_interior_scan(np.array(hull, dtype=np.int64), list(range(len(hull))))
        else:
            hit = None
            xs = [h[0] for h in hull]
            ys = [h[1] for h in hull]
            for x in range(min(xs), max(xs) + 1):
                for y in range(min(ys), max(ys) + 1):
                    if interior_contains(hull, (x, y)):
                        hit = (x, y)
                        break
                if hit:
                    break
        if hit is not None:
            if not interior_contains(S, hit):
                raise InternalInconsistency("interior scan disagrees with exact test")
            return InteriorLatticePoint(hit)
        dirs = [(hull[(t + 1) % len(hull)][0] - hull[t][0], hull[(t + 1) % len(hull)][1] - hull[t][1])
                for t in range(len(hull))]
    else:
        dirs = [(hull[1][0] - hull[0][0], hull[1][1] - hull[0][1])]
    for u in dirs:
        u = _primitive(u)
        a, b = -u[1], u[0]
        offs = sorted({a * x + b * y for x, y in S})
        if len(offs) <= 2:
            c1 = offs[0]
            c2 = offs[1] if len(offs) == 2 else offs[0] + 1
            return TwoParallelLines((a, b, c1), (a, b, c2))
    raise InternalInconsistency("neither an interior lattice point nor two covering lines")


# --- spread --------------------------------------------------------------------------


@dataclass
class SpreadResult:
    ok: bool
    witness: tuple | None = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def _subsets(points_idx, N, mode):
    if mode == "exhaustive" or mode is None:
        yield from itertools.combinations(points_idx, N)
        return
    kind, count, seed = mode
    rng = random.Random(seed)
    for _ in range(count):
        yield tuple(sorted(rng.sample(points_idx, N)))


def spread_check(H: LevelledSet, L: LevelledSet, N: int, r: int, mode="exhaustive",
                 ambient_dim: int | None = None) -> SpreadResult:
    """Every N-subset S of H has, for each residue a mod r, a point of
    L_{a,r} in Int conv S.  Points are taken in the intrinsic frame of
    dimension ambient_dim (default: coordinate length)."""
    if N < 1 or r < 1:
        raise ValueError("N, r must be positive")
    Lset = set(L.points)
    if any(p not in Lset for p in H.points):
        raise ValueError("H is not a subset of L")
    if len(H.points) < N:
        return SpreadResult(True)
    d = ambient_dim if ambient_dim is not None else (L.d if L.points or H.points else 1)
    Lres = [(p, int(L.level(p)) % r) for p in L.points]
    idx = list(range(len(H.points)))
    checked = 0
    if d == 1:
        for S in _subsets(idx, N, mode):
            xs = [H.points[i][0] for i in S]
            lo, hi = min(xs), max(xs)
            got = {res for p, res in Lres if lo < p[0] < hi}
            checked += 1
            for a in range(r):
                if a not in got:
                    return SpreadResult(False, (tuple(H.points[i] for i in S), a), checked)
        return SpreadResult(True, None, checked)
    for S in _subsets(idx, N, mode):
        pts = [H.points[i] for i in S]
        missing = set(range(r))
        for p, res in Lres:
            if res in missing and interior_contains(pts, p):
                missing.discard(res)
                if not missing:
                    break
        checked += 1
        if missing:
            return SpreadResult(False, (tuple(pts), min(missing)), checked)
    return SpreadResult(True, None, checked)


def well_spread_check(H: LevelledSet, L: LevelledSet, N: int, r: int, p_max: int | None = None,
                      mode="exhaustive", ambient_dim: int | None = None) -> SpreadResult:
    """spread_check on every slice (H_{a,p}, L_{a,p}), 1 <= p <= p_max."""
    lv = H.levels()
    if p_max is None:
        p_max = max(1, (max(lv) - min(lv)) if lv else 1)
    total = 0
    for p in range(1, p_max + 1):
        for a in range(p):
            res = spread_check(residue_slice(H, a, p), residue_slice(L, a, p), N, r, mode, ambient_dim)
            total += res.checked
            if not res.ok:
                S, b = res.witness
                return SpreadResult(False, (S, b, a, p), total)
    return SpreadResult(True, None, total)
