"""Staged perturbations of the integer box, the constants recursion and
superset completion."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, isqrt, lcm, prod
from typing import Sequence

from .geometry import (
    _dim,
    affine_dimension,
    as_point,
    general_position,
    integerize,
    integerize_with_scale,
    interior_by_section,
    interior_contains,
    InteriorTester,
)
from .holes import largest_empty_convex_polygon_2d
from .horton import (
    DigitExpansion,
    lift_horton,
    HortonCaps,
    digit_value,
    horton2d_check,
    horton_hd_check,
)
from .levelled import AffineSubspace, LevelledSet, make_flag_frame


def first_primes(d: int) -> list[int]:
    out, c = [], 2
    while len(out) < d:
        if all(c % p for p in out):
            out.append(c)
        c += 1
    return out


@dataclass(frozen=True)
class PrimeSequence:
    d: int

    @property
    def primes(self) -> list[int]:
        return first_primes(self.d)


@dataclass
class StagePlan:
    i: int  # level axis (1-based)
    j: int  # shift axis (1-based)
    expansion: DigitExpansion | None
    magnitude: Fraction
    shift_table: dict = field(default_factory=dict)
    raw_table: dict | None = None

    @property
    def identity(self) -> bool:
        return self.i == self.j or not any(self.shift_table.values())

    def to_json(self) -> dict:
        e = self.expansion
        out = {"stage": [self.i, self.j], "magnitude": str(self.magnitude)}
        if e is not None:
            out.update(base=e.base, epsilon=str(e.epsilon), spacing=e.spacing)
        if self.raw_table is not None:
            out["table"] = {str(x): str(v) for x, v in sorted(self.raw_table.items())}
        return out


def make_stage(i: int, j: int, n_i: int, expansion: DigitExpansion | None, magnitude) -> StagePlan:
    magnitude = Fraction(magnitude)
    if i == j or expansion is None:
        return StagePlan(i, j, None, magnitude, {x: Fraction(0) for x in range(1, n_i + 1)})
    table = {x: magnitude * digit_value(x, expansion) for x in range(1, n_i + 1)}
    return StagePlan(i, j, expansion, magnitude, table)


@dataclass
class PerturbedFamily:
    index_box: tuple
    points: dict
    stage_log: list
    epsilon: Fraction
    verification: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.index_box)

    def indices(self):
        return itertools.product(*[range(1, n + 1) for n in self.index_box])

    def point_list(self) -> list[tuple]:
        return [self.points[x] for x in self.indices()]

    def after_stages(self, count: int) -> dict:
        """Points after the first `count` stages of the log."""
        return apply_stages(self.index_box, self.stage_log[:count])

    def replay(self) -> dict:
        return apply_stages(self.index_box, self.stage_log)

    def max_sq_displacement(self) -> Fraction:
        return max(sum((Fraction(a) - b) ** 2 for a, b in zip(self.points[x], x)) for x in self.indices())


def apply_stages(box: Sequence[int], stages: Sequence[StagePlan]) -> dict:
    d = len(box)
    out = {}
    for x in itertools.product(*[range(1, n + 1) for n in box]):
        c = [Fraction(v) for v in x]
        for st in stages:
            if st.i != st.j:
                c[st.j - 1] += st.shift_table[x[st.i - 1]]
        out[x] = as_point(c)
    return out


# --- constants ------------------------------------------------------------------


@dataclass
class ConstantsTable:
    d: int
    primes: list
    N: list
    C_prime: int
    C: int
    planar_override: tuple | None = None


def constants(d: int) -> ConstantsTable:
    if d < 2:
        raise ValueError("d must be >= 2")
    p = first_primes(d)
    N = [2 ** (d - 1) * (prod(p[1:]) + 2)]
    for k in range(2, d + 1):
        tail = prod(p[k:])  # p_{k+1} ... p_d, empty product 1
        N.append(2 ** (d - k) * N[-1] * (tail + 1) ** k * k ** (2 * k))
    over = (7, 9) if d == 2 else None
    return ConstantsTable(d, p, N, N[-1], N[-1] + d, over)


# --- negligibility certificates ------------------------------------------------------


def _bbox(points):
    lo = [min(p[t] for p in points) for t in range(len(points[0]))]
    hi = [max(p[t] for p in points) for t in range(len(points[0]))]
    return lo, hi


def _in_box(p, lo, hi):
    return all(a <= x <= b for x, a, b in zip(p, lo, hi))


@dataclass
class NegligibilityLog:
    flats_vacuous: int = 0
    flats_translation: int = 0
    flats_enumerated: int = 0
    subsets_checked: int = 0
    interior_pairs: int = 0
    violations: list = field(default_factory=list)


def check_negligible_flat(dom: dict, img: dict, flat_idx: list, max_size: int, log: NegligibilityLog,
                          all_idx: list, cap: int = 200_000):
    """Negligibility of dom -> img on every subset of size <= max_size of
    the flat's points (indices flat_idx), with exact shortcuts:

    * domain points on the flat spanning less than R^d: every subset has
      empty interior;
    * the map restricted to the flat and to all domain points inside the
      flat's bounding box is one translation: affine, so interiority is
      preserved.
    """
    d = len(next(iter(dom.values())))
    D = [dom[x] for x in flat_idx]
    if affine_dimension(D) < d:
        log.flats_vacuous += 1
        return
    lo, hi = _bbox(D)
    near = [x for x in all_idx if _in_box(dom[x], lo, hi)]
    t0 = tuple(Fraction(a) - b for a, b in zip(img[flat_idx[0]], dom[flat_idx[0]]))
    if all(tuple(Fraction(a) - b for a, b in zip(img[x], dom[x])) == t0 for x in near):
        log.flats_translation += 1
        return
    log.flats_enumerated += 1
    total = sum(comb(len(flat_idx), s) for s in range(d + 1, max_size + 1))
    if total > cap:
        raise RuntimeError(f"negligibility enumeration of {total} subsets exceeds cap")
    for s in range(d + 1, max_size + 1):
        for S in itertools.combinations(flat_idx, s):
            _check_subset(dom, img, S, near, log)


def _integer_view(pts: dict) -> dict:
    """The same points scaled by one common denominator (cached)."""
    key = id(pts)
    hit = _INT_CACHE.get(key)
    if hit is not None and hit[0] is pts:
        return hit[1]
    den = 1
    for p in pts.values():
        for c in p:
            den = lcm(den, Fraction(c).denominator)
    out = {x: tuple(int(Fraction(c) * den) for c in p) for x, p in pts.items()}
    if len(_INT_CACHE) >= 4:
        _INT_CACHE.pop(next(iter(_INT_CACHE)))
    _INT_CACHE[key] = (pts, out)
    return out


_INT_CACHE: dict = {}


def _check_subset(dom, img, S, candidates, log):
    Di = _integer_view(dom)
    DS = [Di[x] for x in S]
    lo, hi = _bbox(DS)
    log.subsets_checked += 1
    inside = out = None
    for x in candidates:
        if not _in_box(Di[x], lo, hi):
            continue
        if inside is None:
            inside = InteriorTester(DS)
            if not inside.full:
                return
        if inside(Di[x]):
            log.interior_pairs += 1
            if out is None:
                Ii = _integer_view(img)
                out = (InteriorTester([Ii[y] for y in S]), Ii)
            if not out[0](out[1][x]):
                log.violations.append((tuple(S), x))


def check_negligible_random(dom: dict, img: dict, size: int, count: int, seed: int,
                            log: NegligibilityLog):
    idx = sorted(dom)
    rng = random.Random(seed)
    for _ in range(count):
        S = tuple(rng.sample(idx, size))
        _check_subset(dom, img, S, idx, log)


def axis_lines(box: Sequence[int]) -> list[tuple[int, list]]:
    """(axis, list of indices) for every axis-parallel lattice line."""
    d = len(box)
    out = []
    for a in range(d):
        others = [range(1, n + 1) if t != a else [None] for t, n in enumerate(box)]
        for base in itertools.product(*others):
            line = []
            for v in range(1, box[a] + 1):
                x = list(base)
                x[a] = v
                line.append(tuple(x))
            out.append((a, line))
    return out


def axis_planes(box: Sequence[int]) -> list[tuple[tuple, list]]:
    d = len(box)
    out = []
    for a, b in itertools.combinations(range(d), 2):
        rest = [t for t in range(d) if t not in (a, b)]
        for fixed in itertools.product(*[range(1, box[t] + 1) for t in rest]):
            pts = []
            for x in itertools.product(*[range(1, n + 1) for n in box]):
                if all(x[t] == f for t, f in zip(rest, fixed)):
                    pts.append(x)
            out.append(((a, b), pts))
    return out


# --- planar construction ----------------------------------------------------------------


class VerificationFailure(RuntimeError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _planar_family(n: int, s: int, t: int) -> PerturbedFamily:
    eps, delta = Fraction(1, 2 ** s), Fraction(1, 2 ** t)
    st1 = make_stage(1, 2, n, DigitExpansion(2, eps), 1)
    st2 = make_stage(2, 1, n, DigitExpansion(2, delta), 1)
    box = (n, n)
    pts = apply_stages(box, [st1, st2])
    return PerturbedFamily(box, pts, [st1, st2], Fraction(0))


def _verify_planar(fam: PerturbedFamily, target: Fraction, seed: int, samples: int,
                   check_holes: bool) -> tuple[bool, dict]:
    n = fam.index_box[0]
    info = {}
    sq = fam.max_sq_displacement()
    info["max_sq_displacement"] = str(sq)
    if not sq < target * target:
        return False, {**info, "failed": "epsilon bound"}
    for y in range(1, n + 1):
        row = [fam.points[(x, y)] for x in range(1, n + 1)]
        off = -fam.stage_log[1].shift_table[y]
        if not horton2d_check(LevelledSet(row, (1, 0), off)).accepted:
            return False, {**info, "failed": f"row {y} not Horton"}
    for x in range(1, n + 1):
        col = [(p[1], p[0]) for p in (fam.points[(x, y)] for y in range(1, n + 1))]
        off = -fam.stage_log[0].shift_table[x]
        if not horton2d_check(LevelledSet(col, (1, 0), off)).accepted:
            return False, {**info, "failed": f"column {x} not Horton"}
    info["rows_columns_horton"] = True
    dom = fam.after_stages(1)
    log = NegligibilityLog()
    idx = sorted(dom)
    for _, line in axis_lines(fam.index_box):
        check_negligible_flat(dom, fam.points, line, 4, log, idx)
    check_negligible_random(dom, fam.points, 4, samples, seed, log)
    if log.violations:
        return False, {**info, "failed": "negligibility", "witness": log.violations[0]}
    info["negligibility"] = vars(log).copy()
    if check_holes and n >= 3:
        rep = largest_empty_convex_polygon_2d(fam.point_list())
        info["largest_hole"] = rep.largest_size
        if rep.largest_size > 6:
            return False, {**info, "failed": "7-hole found"}
    return True, info


def build_planar(n: int, epsilon_target, check_holes: bool = True, seed: int = 0,
                 samples: int = 0, max_attempts: int = 12) -> PerturbedFamily:
    """Column shifts (x)_eps e_2, then row shifts (y)_delta e_1, with
    eps = 2^-s, delta = 2^-2s; s grows until every check passes.

    Certificate subsets for the second stage are the small subsets of rows
    and columns.  Global random subsets (``samples``) are off by default:
    with delta = eps^2 a lattice-collinear triple from three different rows
    can gain an order-eps^3 margin in the first stage that the order-delta
    row shifts then undo, so global negligibility is not what this
    construction provides.  The exact hole search covers the rest."""
    target = Fraction(epsilon_target)
    if n < 1 or target <= 0:
        raise ValueError("need n >= 1 and a positive epsilon")
    s = max(2, n.bit_length() + 1)
    while Fraction(4, 2 ** s) >= target:
        s += 1
    attempts = []
    for _ in range(max_attempts):
        fam = _planar_family(n, s, 2 * s)
        ok, info = _verify_planar(fam, target, seed, samples, check_holes)
        attempts.append({"s": s, "t": 2 * s, **{k: v for k, v in info.items() if k == "failed"}})
        if ok:
            fam.epsilon = target
            fam.verification = {"attempts": attempts, **info, "generator": "planar", "s": s, "t": 2 * s}
            return fam
        s += 1
    raise VerificationFailure("planar construction did not verify within the attempt budget", attempts)


# --- higher-dimensional construction ------------------------------------------------------


def stage_order(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, d + 1) for j in range(1, d + 1)]


def _resolution(table: dict) -> Fraction:
    vals = sorted(set(table.values()))
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    nz = [abs(v) for v in vals if v] + gaps
    return min(nz) if nz else Fraction(1)


def _dyadic_below(x: Fraction) -> Fraction:
    """Largest 2^-k not exceeding x (x in (0, 1])."""
    k = 0
    while Fraction(1, 2 ** k) > x:
        k += 1
    return Fraction(1, 2 ** k)


def _stage_bases(box, raw: dict, i: int, j: int, primes, plane_window: int):
    """Frame images of the flats whose jump chain ends in a stage (i, j)
    lift: the e_i lines and (for d >= 3) the planes span(e_i, e_a), a > i.

    Only the stage tables with level axis i vary on these flats; every
    other stage is a translation there, and per-coordinate scalings do not
    change the Horton property, so the unscaled tables ``raw`` suffice."""
    d = len(box)
    n = box[i - 1]
    bases, ks, plist = [], [], []
    J = [a for a in range(1, d + 1) if a != i]
    before = J[: J.index(j)]
    pts = [tuple([x] + [raw[(i, a)][x] for a in before]) for x in range(1, n + 1)]
    bases.append(LevelledSet(pts, tuple([1] + [0] * len(before)), 0))
    ks.append(1)
    plist.append(tuple(primes[a - 1] for a in before + [j]))
    if d >= 3:
        for a in range(i + 1, d + 1):
            if a == j:
                continue
            Jp = [c for c in range(1, d + 1) if c not in (i, a)]
            pre = Jp[: Jp.index(j)]
            pts = []
            for x in range(1, min(n, plane_window) + 1):
                for y in range(1, min(box[a - 1], 3) + 1):
                    ya = y + raw[(i, a)][x] if (i, a) in raw else Fraction(y)
                    pts.append(tuple([x, ya] + [raw[(i, c)][x] for c in pre]))
            bases.append(LevelledSet(pts, tuple([1] + [0] * (1 + len(pre))), 0))
            ks.append(2)
            plist.append(tuple(primes[c - 1] for c in pre + [j]))
    return bases, ks, plist


def lift_tables(box: Sequence[int], plane_window: int = 16, caps: HortonCaps | None = None) -> dict:
    """Unscaled shift tables, stage (i, j) -> {x_i: value}, with |value| < 1.

    Stage (i, j) takes the table lift_horton finds for the flats it
    completes (prime p_j on top)."""
    box = tuple(box)
    d = len(box)
    primes = first_primes(d)
    raw: dict = {}
    for (i, j) in stage_order(d):
        if i == j:
            continue
        bases, ks, plist = _stage_bases(box, raw, i, j, primes, plane_window)
        table = lift_horton(bases, 1, ks, plist, caps=caps).entries
        raw[(i, j)] = {x: table.get(x, Fraction(0)) for x in range(1, box[i - 1] + 1)}
    return raw


def plan_stages(box: Sequence[int], epsilon_target, t: int = 8, power: int = 1,
                raw: dict | None = None) -> list[StagePlan]:
    """Scale the tables along a product magnitude ladder.

    A stage's largest shift is at most 2^-t / (d d! D^(d-1)) times
    (product of all earlier stage resolutions)^power: interiority margins
    left by earlier stages are polynomials in their shifts, so a geometric
    ladder is not enough."""
    box = tuple(box)
    d = len(box)
    raw = lift_tables(box) if raw is None else raw
    budget = Fraction(epsilon_target) / (2 * d)
    # a shift of size s moves a d x d determinant of box differences by at
    # most d * d! * D^(d-1) * s; the lattice itself has resolution 1
    D = max(box)
    scale = Fraction(1, d * factorial(d) * D ** (d - 1))
    stages = []
    res_prod = Fraction(1)
    for (i, j) in stage_order(d):
        if i == j:
            stages.append(make_stage(i, j, box[i - 1], None, 0))
            continue
        table = raw[(i, j)]
        mx = max((abs(v) for v in table.values()), default=Fraction(0)) or Fraction(1)
        cap = min(budget, scale * res_prod ** power / 2 ** t)
        eta = _dyadic_below(cap / mx)
        st = StagePlan(i, j, None, eta, {x: eta * v for x, v in table.items()}, table)
        stages.append(st)
        res_prod *= _resolution(st.shift_table)
    return stages


def _line_frame_set(fam: PerturbedFamily, upto_stage: int, line: list, axis: int, window=None):
    """phi_V(P^{stage}_V - v) for an axis line, optionally restricted to a
    window of consecutive indices.  Returns (LevelledSet, primes)."""
    d = fam.d
    pts_stage = apply_stages(fam.index_box, fam.stage_log[:upto_stage]) if upto_stage is not None else fam.points
    idx = line if window is None else line[window[0]:window[1]]
    base = list(line[0])
    base[axis] = 0
    V = AffineSubspace(tuple(base), [tuple(int(t == axis) for t in range(d))])
    fr = make_flag_frame(V)
    # translation accumulated on this line by stages that are constant on it
    v = [Fraction(0)] * d
    for st in fam.stage_log[:upto_stage]:
        if st.i != st.j and st.i - 1 != axis:
            v[st.j - 1] += st.shift_table[line[0][st.i - 1]]
    pts = []
    for x in idx:
        q = [Fraction(a) - b for a, b in zip(pts_stage[x], v)]
        pts.append(fr.phi(q))
    return LevelledSet(pts, tuple([1] + [0] * (d - 1)), 0), fr


def verify_lines_horton(fam: PerturbedFamily, window: int | None = 24, caps: HortonCaps | None = None,
                        lines=None) -> dict:
    """Horton structure of axis lines: phi_V(P^{(i, j_d)}_V - v) must be
    (d,1)-Horton w.r.t. p_{j_2} ... p_{j_d}.  Long lines are checked on
    consecutive windows (subsets of Horton sets with the same level map are
    Horton, so every window is a necessary condition)."""
    d = fam.d
    primes = first_primes(d)
    order = stage_order(d)
    results = {"checked": 0, "indeterminate": 0, "failures": []}
    for axis, line in (lines if lines is not None else axis_lines(fam.index_box)):
        if len(line) < 2:
            continue
        i = axis + 1
        V = AffineSubspace(tuple(0 for _ in range(d)), [tuple(int(t == axis) for t in range(d))])
        jumps = make_flag_frame(V).j_indices
        upto = order.index((i, jumps[-1])) + 1
        qs = tuple(primes[j - 1] for j in jumps)
        wins = [None] if window is None or len(line) <= window else \
            [(s, s + window) for s in range(0, len(line) - window + 1, max(1, window // 2))]
        for w in wins:
            H, _ = _line_frame_set(fam, upto, line, axis, w)
            rep = horton_hd_check(H, 1, qs, caps)
            results["checked"] += 1
            if rep.accepted is None:
                results["indeterminate"] += 1
            elif not rep.accepted:
                results["failures"].append((axis, line[0], w, rep.reason))
    return results


def window_interior_scan(fam: PerturbedFamily, axis: int, window: int) -> dict:
    """For every axis line and every `window` consecutive indices on it,
    some family point must lie strictly inside the hull of that window."""
    out = {"windows": 0, "failures": []}
    for a, line in axis_lines(fam.index_box):
        if a != axis or len(line) < window:
            continue
        Pi, _ = integerize_with_scale([fam.points[x] for x in line])
        for s in range(len(line) - window + 1):
            W = Pi[s:s + window]
            out["windows"] += 1
            hit = False
            # strictly interior order statistics first: middle of the window
            mids = list(range(1, window - 1))
            mids.sort(key=lambda m: abs(m - window // 2))
            for m in mids:
                if interior_by_section(W, W[m]):
                    hit = True
                    break
            if not hit:
                out["failures"].append((line[0], s))
    return out


def verify_negligibility_hd(fam: PerturbedFamily, max_size: int, random_count: int, seed: int) -> dict:
    logs = {}
    idx = sorted(fam.points)
    lines = axis_lines(fam.index_box)
    prev = apply_stages(fam.index_box, [])
    for s, st in enumerate(fam.stage_log):
        cur = apply_stages(fam.index_box, fam.stage_log[: s + 1])
        log = NegligibilityLog()
        if st.i != st.j:
            for _, line in lines:
                check_negligible_flat(prev, cur, line, max_size, log, idx)
            check_negligible_random(prev, cur, max_size, random_count, seed + s, log)
        logs[f"{st.i},{st.j}"] = vars(log).copy()
        if log.violations:
            raise VerificationFailure(f"stage ({st.i},{st.j}) not negligible", log.violations[0])
        prev = cur
    return logs


def build_hd(box: Sequence[int], epsilon_target, verification_budget: dict | None = None,
             seed: int = 0, max_attempts: int = 12) -> PerturbedFamily:
    """Stages (1,1) ... (d,d); stage (i,j) shifts along e_j by a shift
    depending on x_i.  Tables are lifted once; only the magnitude ladder
    (t, power) is retried.  Verifies the displacement bound, stage negligibility
    on axis lines and random subsets, and the Horton property of axis lines
    (windowed) before returning."""
    box = tuple(int(n) for n in box)
    d = len(box)
    if d < 2 or min(box) < 1:
        raise ValueError("need d >= 2 and a positive box")
    target = Fraction(epsilon_target)
    budget = {"subset_size": d + 2, "random_subsets": 500, "horton_window": 24,
              "horton_lines": True, "max_pairs": 2_000_000, "plane_window": 16,
              "ladder": [(8, 1), (8, 2), (16, 2), (8, 3), (16, 3), (16, 4)]}
    budget.update(verification_budget or {})
    raw = lift_tables(box, budget["plane_window"], HortonCaps(max_pairs=budget["max_pairs"]))
    attempts = []
    for t, power in budget["ladder"][:max_attempts]:
        stages = plan_stages(box, target, t=t, power=power, raw=raw)
        pts = apply_stages(box, stages)
        fam = PerturbedFamily(box, pts, stages, target)
        info = {"t": t, "power": power}
        sq = fam.max_sq_displacement()
        if not sq < target * target:
            attempts.append({**info, "failed": "epsilon bound"})
            continue
        try:
            info["negligibility"] = verify_negligibility_hd(fam, budget["subset_size"],
                                                            budget["random_subsets"], seed)
        except VerificationFailure as e:
            attempts.append({**info, "failed": str(e)})
            continue
        if budget["horton_lines"]:
            caps = HortonCaps(max_pairs=budget["max_pairs"])
            hr = verify_lines_horton(fam, budget["horton_window"], caps)
            info["horton_lines"] = {k: (v if k != "failures" else len(v)) for k, v in hr.items()}
            if hr["failures"]:
                attempts.append({**info, "failed": f"horton: {hr['failures'][0]}"})
                continue
        info["max_sq_displacement"] = str(sq)
        info["attempts"] = attempts
        info["generator"] = "hd"
        fam.verification = info
        return fam
    raise VerificationFailure("higher-dimensional construction did not verify: "
                              + "; ".join(f"(t={a['t']}, power={a['power']}) {a['failed']}" for a in attempts),
                              attempts)


# --- superset completion --------------------------------------------------------------------


def _inradius_sq_lower_2d(tri) -> Fraction:
    """(2 area / perimeter)^2 with the perimeter bounded above rationally."""
    (ax, ay), (bx, by), (cx, cy) = [tuple(Fraction(v) for v in p) for p in tri]
    area2 = abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    per = Fraction(0)
    for (px, py), (qx, qy) in (((ax, ay), (bx, by)), ((bx, by), (cx, cy)), ((cx, cy), (ax, ay))):
        sq = (px - qx) ** 2 + (py - qy) ** 2
        r = Fraction(isqrt(int(sq * 10 ** 8) + 1) + 1, 10 ** 4)
        per += r
    return (area2 / per) ** 2


def complete_superset(S: Sequence[Sequence], d: int, epsilon_target=Fraction(1, 10), seed: int = 0,
                      max_points: int = 2000, check_holes: bool = True):
    """T = S plus a scaled perturbed grid piercing every (d+1)-subset of S.

    Returns (T, info)."""
    S = [as_point(p) for p in S]
    if S and not general_position(S):
        raise ValueError("S must be in general position")
    simplices = [c for c in itertools.combinations(S, d + 1)] if len(S) >= d + 1 else []
    if not simplices:
        n = 4
        Q = (build_planar(n, epsilon_target, check_holes) if d == 2 else
             build_hd((n,) * d, epsilon_target)).point_list()
        T = list(S) + Q
        return general_position_perturb(T, C_hole(d)), {"n": n, "pitch": 1}
    lo = [min(p[t] for p in S) for t in range(d)]
    hi = [max(p[t] for p in S) for t in range(d)]
    if d == 2:
        r2 = min(_inradius_sq_lower_2d(s) for s in simplices)
        # a disc of radius r holds a perturbed grid point of pitch h once r > h(1/sqrt2 + 1/10)
        pitch = _rational_sqrt_floor(r2) * Fraction(6, 5)
    else:
        pitch = min(Fraction(hi[t] - lo[t]) for t in range(d)) / 4
    info = {}
    for _ in range(20):
        n = int(max(Fraction(hi[t] - lo[t]) for t in range(d)) / pitch) + 3
        if n ** d > max_points:
            raise RuntimeError(f"grid of {n}^{d} points exceeds max_points")
        fam = build_planar(n, epsilon_target, check_holes) if d == 2 else \
            build_hd((n,) * d, epsilon_target, {"horton_window": 12, "random_subsets": 100})
        origin = [lo[t] - pitch for t in range(d)]
        Q = [tuple(origin[t] + pitch * (Fraction(p[t]) - 1) for t in range(d)) for p in fam.point_list()]
        Q = [as_point(q) for q in Q]
        if all(_pierced(s, Q) for s in simplices):
            info = {"n": n, "pitch": str(pitch), "family": fam.verification}
            T = list(S) + Q
            T2 = general_position_perturb(T, C_hole(d), protect=len(S))
            return T2, info
        pitch /= 2
    raise RuntimeError("could not pierce every simplex of S")


def C_hole(d: int) -> int:
    return 9 if d == 2 else constants(d).C


def _rational_sqrt_floor(x: Fraction) -> Fraction:
    return Fraction(isqrt(int(x * 10 ** 8)), 10 ** 4)


def _pierced(simplex, Q) -> bool:
    lo, hi = _bbox(list(simplex))
    return any(_in_box(q, lo, hi) and interior_contains(list(simplex), q) for q in Q)


def general_position_perturb(T: Sequence[Sequence], hole_bound: int, protect: int = 0,
                             base=Fraction(1, 2 ** 20), max_halvings: int = 40,
                             certificates: Sequence[tuple] | None = None) -> list[tuple]:
    """Deterministic micro-shifts along the moment curve until T is in
    general position; the first `protect` points stay fixed.  Interior
    witnesses in `certificates` (pairs (subset indices, point index)) must
    survive."""
    T = [as_point(p) for p in T]
    if not T:
        return T
    d = _dim(T)
    if general_position(T):
        return T
    certs = list(certificates or [])
    eta = Fraction(base)
    for _ in range(max_halvings):
        out = []
        for k, p in enumerate(T):
            if k < protect:
                out.append(p)
            else:
                m = k + 1
                out.append(as_point([Fraction(c) + eta * m ** (t + 1) / (len(T) ** (t + 1)) for t, c in enumerate(p)]))
        if general_position(out) and all(
            interior_contains([out[i] for i in S], out[x]) for S, x in certs
        ):
            return out
        eta /= 2
    raise RuntimeError("general-position perturbation budget exceeded")
