"""Digit expansions, planar and (d,k)-Horton checkers, closedness checks
and the constructive lifting of Horton sets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import (
    BudgetExceeded,
    as_point,
    deep_below_2d,
    high_above_witness,
    integerize,
    sign,
)
from .levelled import LevelledSet, residue_slice


# --- digit expansions -----------------------------------------------------------


@dataclass(frozen=True)
class DigitExpansion:
    """N = sum a_k b^k  ->  sum g(a_k) eps^(k+1).

    g(t) = t for spacing 1, otherwise (M^t - 1)/(M - 1): consecutive
    digit values are spaced geometrically so that the classes of a base-b
    split are stacked with room to spare.  For b = 2 every spacing gives
    the binary expansion."""

    base: int
    epsilon: Fraction
    spacing: int = 1

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    def weight(self, t: int) -> int:
        M = self.spacing
        return t if M == 1 else (M ** t - 1) // (M - 1)

    @property
    def max_weight(self) -> int:
        return self.weight(self.base - 1)


def digit_value(N: int, expansion: DigitExpansion) -> Fraction:
    if N < 0:
        raise ValueError("N must be non-negative")
    b, e = expansion.base, expansion.epsilon
    out = Fraction(0)
    k = 0
    while N:
        N, a = divmod(N, b)
        if a:
            out += expansion.weight(a) * e ** (k + 1)
        k += 1
    return out


# --- reports -----------------------------------------------------------------------


@dataclass
class HortonReport:
    accepted: bool | None  # None = indeterminate (cap exceeded)
    complexity: int = 0
    trace: dict = field(default_factory=dict)
    failure_witness: object = None
    reason: str = ""

    @property
    def depth(self) -> int:
        def dep(t):
            ch = t.get("children", [])
            return 0 if not ch else 1 + max(dep(c) for c in ch)

        return dep(self.trace)

    def __bool__(self):
        return bool(self.accepted)


def _reject(reason, witness=None, trace=None):
    return HortonReport(False, 0, trace or {"rule": "reject", "reason": reason}, witness or reason, reason)


def _axis_form(L: LevelledSet):
    """(a, b) when the level map is a*pi_1 + b, else None."""
    if any(c != 0 for c in L.coeffs[1:]) or L.coeffs[0] == 0:
        return None
    return L.coeffs[0], L.offset


# --- planar Horton -------------------------------------------------------------------


def horton2d_check(H: LevelledSet) -> HortonReport:
    """Recursive parity-split check; levels must be injective and
    consecutive, slices compared with the strict line test."""
    if H.d != 2:
        raise ValueError("planar levelled set required")
    if _axis_form(H) is None:
        raise ValueError("level map must be a*pi_1 + b")
    lv = H.levels()
    if len(set(lv)) != len(lv):
        return _reject("level map not injective")
    if lv and sorted(lv) != list(range(min(lv), min(lv) + len(lv))):
        return _reject("levels are not consecutive")
    return _h2(H)


def _h2(H: LevelledSet) -> HortonReport:
    n = len(H.points)
    if n <= 1:
        return HortonReport(True, 0, {"rule": 1, "size": n})
    H0, H1 = residue_slice(H, 0, 2), residue_slice(H, 1, 2)
    r0, r1 = _h2(H0), _h2(H1)
    trace = {"rule": 2, "size": n, "children": [r0.trace, r1.trace]}
    if not r0.accepted:
        return HortonReport(False, 0, trace, r0.failure_witness, "even slice: " + r0.reason)
    if not r1.accepted:
        return HortonReport(False, 0, trace, r1.failure_witness, "odd slice: " + r1.reason)
    if deep_below_2d(H0.points, H1.points):
        trace["orientation"] = "even below odd"
    elif deep_below_2d(H1.points, H0.points):
        trace["orientation"] = "odd below even"
    else:
        return HortonReport(False, 0, trace, (H0.points, H1.points),
                            "neither parity slice lies deep below the other")
    return HortonReport(True, 1 + max(r0.complexity, r1.complexity), trace)


# --- closedness --------------------------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chains(P, r, want):
    """All r-point sequences (increasing x) with every consecutive triple
    turning with sign `want` (+1: convex, i.e. middle point below)."""
    n = len(P)
    stack = [[i] for i in range(n)]
    while stack:
        c = stack.pop()
        if len(c) == r:
            yield c
            continue
        for j in range(c[-1] + 1, n):
            if len(c) >= 2 and sign(_cross(P[c[-2]], P[c[-1]], P[j])) != want:
                continue
            stack.append(c + [j])


def _above_polyline(chain_pts, p, want) -> bool:
    x = p[0]
    for a, b in zip(chain_pts, chain_pts[1:]):
        if a[0] < x < b[0] or (a[0] < x == b[0]) or (a[0] == x < b[0]):
            # sign of p relative to the segment line, x-sorted
            return sign(_cross(a, b, p)) == want
    return False


def closed_check(A: Sequence[Sequence], r: int, side: str = "both"):
    """Every convex (concave) r-sequence is upper (lower) closed by a point
    of A.  Returns (ok, witness sequence)."""
    pts = [as_point(p) for p in A]
    xs = [p[0] for p in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("pi_1 must be injective")
    if len(pts) < r:
        return True, None
    P = sorted(integerize(pts))
    orig = {q: p for q, p in zip(integerize(pts), pts)}
    sides = {"upper": [1], "lower": [-1], "both": [1, -1]}[side]
    for want in sides:
        # want=+1: convex sequence (left turns), closer must lie above
        for c in _chains(P, r, want):
            cp = [P[i] for i in c]
            lo, hi = cp[0][0], cp[-1][0]
            ok = False
            for q in P:
                if lo < q[0] < hi and q not in cp and _above_polyline(cp, q, want):
                    ok = True
                    break
            if not ok:
                return False, [orig[q] for q in cp]
    return True, None


# --- (d,k)-Horton ---------------------------------------------------------------------


@dataclass
class HortonCaps:
    max_points: int = 4096
    max_prime: int = 7
    max_pairs: int | None = 2_000_000


def _project(L: LevelledSet) -> LevelledSet:
    out = LevelledSet.__new__(LevelledSet)
    out.points = [p[:-1] for p in L.points]
    out.coeffs = L.coeffs[:-1]
    out.offset = L.offset
    return out


def _split_deep_below(classes: list[list], I: Sequence[int], max_pairs):
    """Find J subset I (try I minus max first) with union_J deep below
    union_{I-J}.  Returns (J, None) or (None, witness)."""
    I = list(I)
    z = max(I)
    order = [tuple(i for i in I if i != z)]
    for size in range(1, len(I)):
        for J in itertools.combinations(I, size):
            if J != order[0]:
                order.append(J)
    last = None
    for J in order:
        lo = [p for i in J for p in classes[i]]
        hi = [p for i in I if i not in J for p in classes[i]]
        w = high_above_witness(hi, lo, max_pairs) if lo and hi else None
        if w is None:
            return J, None
        last = (J, w)
    return None, last


def horton_hd_check(H: LevelledSet, k: int, primes: Sequence[int], caps: HortonCaps | None = None,
                    memo: dict | None = None) -> HortonReport:
    """(d,k)-Horton test with respect to primes = (q_{k+1}, ..., q_d).

    Caps (set size, largest prime, generic-pair budget) return an
    indeterminate report instead of guessing."""
    caps = caps or HortonCaps()
    memo = {} if memo is None else memo
    d = H.d
    if len(primes) != d - k:
        raise ValueError(f"need {d - k} primes for a ({d},{k}) check")
    if _axis_form(H) is None:
        raise ValueError("level map must be a*pi_1 + b")
    proj = [p[:k] for p in H.points]
    if len(set(proj)) != len(proj):
        return _reject(f"pi_[{k}] not injective")
    if len(H.points) > caps.max_points:
        return HortonReport(None, 0, {"rule": "cap"}, None, "indeterminate: point cap exceeded")
    if primes and max(primes) > caps.max_prime:
        return HortonReport(None, 0, {"rule": "cap"}, None, "indeterminate: prime cap exceeded")
    try:
        return _hd(H, k, tuple(primes), caps, memo)
    except BudgetExceeded as e:
        return HortonReport(None, 0, {"rule": "cap"}, None, f"indeterminate: {e}")


def _hd(H: LevelledSet, k: int, primes: tuple, caps: HortonCaps, memo: dict) -> HortonReport:
    d = H.d
    key = (H.fingerprint(), k, primes)
    if key in memo:
        return memo[key]
    if d == k:
        rep = HortonReport(True, 0, {"rule": 1, "size": len(H.points)})
        memo[key] = rep
        return rep
    if len({p[0] for p in H.points}) <= 1:
        rep = HortonReport(True, 0, {"rule": 2, "size": len(H.points)})
        memo[key] = rep
        return rep
    p = primes[-1]
    trace = {"rule": 3, "size": len(H.points), "prime": p, "children": []}
    ra = _hd(_project(H), k, primes[:-1], caps, memo)
    trace["projection"] = ra.trace
    if not ra.accepted:
        rep = HortonReport(ra.accepted, 0, trace, ra.failure_witness, "projection: " + ra.reason)
        memo[key] = rep
        return rep
    slices = [residue_slice(H, i, p) for i in range(p)]
    comp = 0
    for i, S in enumerate(slices):
        rb = _hd(S, k, primes, caps, memo)
        trace["children"].append(rb.trace)
        if not rb.accepted:
            rep = HortonReport(rb.accepted, 0, trace, rb.failure_witness, f"slice {i}: " + rb.reason)
            memo[key] = rep
            return rep
        comp = max(comp, rb.complexity)
    classes = [S.points for S in slices]
    splits = {}
    for size in range(2, p + 1):
        for I in itertools.combinations(range(p), size):
            J, w = _split_deep_below(classes, I, caps.max_pairs)
            if J is None:
                rep = HortonReport(False, 0, trace, (I, w), f"no deep-below split of {I}")
                memo[key] = rep
                return rep
            splits[I] = J
    trace["splits"] = splits
    rep = HortonReport(True, comp + 1, trace)
    memo[key] = rep
    return rep


# --- lifting -----------------------------------------------------------------------------


@dataclass
class ShiftTable:
    entries: dict
    bound: Fraction

    def __post_init__(self):
        self.bound = Fraction(self.bound)
        if any(abs(v) >= self.bound for v in self.entries.values()):
            raise ValueError("shift exceeds bound")

    def __getitem__(self, x):
        return self.entries.get(x, Fraction(0))


def _lift_points(B: LevelledSet, a: dict) -> LevelledSet:
    pts = [tuple(p) + (a.get(int(B.level(p)), Fraction(0)),) for p in B.points]
    return LevelledSet(pts, tuple(B.coeffs) + (Fraction(0),), B.offset)


def lift_horton(bases: Sequence[LevelledSet], bound, k, primes_list: Sequence[Sequence[int]],
                max_doublings: int = 200, caps: HortonCaps | None = None) -> ShiftTable:
    """Shifts a_x (indexed by level) lifting every base to a Horton set one
    dimension up.

    Levels are split by residue mod the common top prime, each class is
    lifted recursively and rescaled into [0, 1), then class i is raised by
    c + c^2 + ... + c^i with c doubled until every class lies high above the classes below
    it in every base.  The result is rescaled below the bound and
    re-verified.  ``k`` is one flat dimension or one per base."""
    bound = Fraction(bound)
    ks = [k] * len(bases) if isinstance(k, int) else list(k)
    tops = {tuple(ps)[-1] for ps in primes_list}
    if len(tops) != 1:
        raise ValueError("bases must share the top prime")
    p = tops.pop()
    for B in bases:
        if _axis_form(B) is None:
            raise ValueError("level map must be a*pi_1 + b")
    # levels measured once in the shared level map
    levels = sorted({lv for B in bases for lv in B.levels()})

    def rec(levs: list[int], scale: int, resid: int) -> dict:
        # levs are original levels; inside the slice they are (x - resid)/scale
        if len({x for x in levs}) <= 1:
            return {x: Fraction(0) for x in levs}
        parts = []
        for i in range(p):
            cls = [x for x in levs if ((x - resid) // scale) % p == i]
            parts.append(cls)
        subs = []
        for i, cls in enumerate(parts):
            t = rec(cls, scale * p, resid + i * scale) if cls else {}
            m = max((abs(v) for v in t.values()), default=Fraction(0))
            if m:
                t = {x: v / (2 * m) for x, v in t.items()}
            subs.append(t)
        c = 2
        for _ in range(max_doublings):
            table = {}
            for i, t in enumerate(subs):
                off = c * (c ** i - 1) // (c - 1)
                for x, v in t.items():
                    table[x] = v + off
            if _stack_ok(bases, parts, table, caps):
                return table
            c *= 2
        raise RuntimeError("no valid stacking found within the doubling limit")

    table = rec(levels, 1, 0)
    m = max((abs(v) for v in table.values()), default=Fraction(0))
    if m:
        f = bound / (2 * m)
        table = {x: v * f for x, v in table.items()}
    for B, kk, ps in zip(bases, ks, primes_list):
        rep = horton_hd_check(_lift_points(B, table), kk, tuple(ps), caps)
        if not rep.accepted:
            raise RuntimeError(f"lifted set failed verification: {rep.reason}")
    return ShiftTable(table, bound)


def _stack_ok(bases, parts, table, caps) -> bool:
    max_pairs = caps.max_pairs if caps else None
    for B in bases:
        lifted = _lift_points(B, table)
        lvl = lifted.levels()
        groups = []
        for cls in parts:
            s = set(cls)
            groups.append([q for q, lv in zip(lifted.points, lvl) if lv in s])
        below: list = []
        for g in groups:
            if below and g and high_above_witness(g, below, max_pairs) is not None:
                return False
            below = below + g
    return True


def horton_planar_points(n: int, epsilon, base: int = 2, spacing: int = 1) -> list[tuple]:
    e = DigitExpansion(base, Fraction(epsilon), spacing)
    return [(x, digit_value(x, e)) for x in range(1, n + 1)]


def gen_horton_planar(n: int, epsilon_hint, max_halvings: int = 200):
    """{(x, (x)_eps) : x in [n]}, halving eps until the checker accepts.

    Returns (points, eps, report)."""
    eps = Fraction(epsilon_hint)
    if not 0 < eps < 1:
        raise ValueError("epsilon hint must lie in (0, 1)")
    while eps >= Fraction(1, 2):
        eps /= 2
    for _ in range(max_halvings):
        pts = horton_planar_points(n, eps)
        rep = horton2d_check(LevelledSet.along_axis(pts, 0, d=2))
        if rep.accepted:
            return pts, eps, rep
        eps /= 2
    raise RuntimeError("halving budget exhausted")
