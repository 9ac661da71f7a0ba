"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL`` line (visible under
``pytest -v``) and then asserts."""
import itertools
import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import pytest

from holefree.construction import (
    PerturbedFamily,
    build_planar,
    complete_superset,
    constants,
    build_hd,
    verify_negligibility_hd,
    window_interior_scan,
)
from holefree.geometry import general_position, interior_contains
from holefree.holes import brute_force_largest_empty_2d_masks, largest_empty_convex_polygon_2d, spread
from holefree.horton import closed_check, gen_horton_planar, horton2d_check
from holefree.io import PointSetFile, replay_manifest, stage_from_json
from holefree.levelled import (
    Cube,
    HyperplaneCertificate,
    InteriorLatticePoint,
    LevelledSet,
    basic_cube_reduce,
    classify_interior_or_two_lines,
    cube_coefficients,
    find_basic_cube,
    residue_slice,
)

from oracles import (
    classification_oracle,
    constants_oracle,
    in_general_position_2d,
    largest_empty_convex_bruteforce,
    random_horton,
    validate_classification,
)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        assert ok, detail
    return emit


def cli(*args):
    return subprocess.run([sys.executable, "-m", "holefree.cli", *args], capture_output=True, text=True)


def sq_dist(p, q):
    return sum((F(a) - F(b)) ** 2 for a, b in zip(p, q))


# 1 ------------------------------------------------------------------------------------------

def test_c1_planar_no_7_hole(report, tmp_path):
    details, ok = [], True
    for n in (16, 8, 24):
        t0 = time.time()
        out = tmp_path / f"g{n}.pts"
        r = cli("--seed", "0", "gen2d", "--n", str(n), "--eps", "1/10", "--out", str(out))
        f = PointSetFile.read(out)
        big = largest_empty_convex_polygon_2d(f.points).largest_size
        dt = time.time() - t0
        good = r.returncode == 0 and f.k == n * n and big <= 6 and dt < 300
        ok &= good
        details.append(f"n={n}: {f.k} pts, largest hole {big}, {dt:.0f}s")
    report(1, ok, "; ".join(details))


# 2 ------------------------------------------------------------------------------------------

def test_c2_epsilon_bound(report):
    eps2 = F(1, 100)
    worst, count = F(0), 0
    fams = [build_planar(n, F(1, 10), check_holes=False) for n in (1, 8, 16, 24)]
    fams += [build_hd(b, F(1, 10)) for b in ((4, 4, 4), (8, 8, 8), (24, 4, 4))]
    ok = True
    for fam in fams:
        for x, p in fam.points.items():
            s = sq_dist(p, x)
            ok &= s < eps2
            worst = max(worst, s)
            count += 1
    report(2, ok, f"{count} points, max |P_x - x|^2 = {float(worst):.3g} < 1/100")


# 3 ------------------------------------------------------------------------------------------

def test_c3_horton_suite(report):
    failures = []
    for n in (1, 2, 3, 5, 8, 13, 16, 24, 31, 32, 33, 48, 64):
        pts, _, rep = gen_horton_planar(n, F(1, 4))
        H = LevelledSet.along_axis(pts, 0, d=2)
        if not horton2d_check(H).accepted:
            failures.append(f"gen n={n}")
        for p in range(1, 9):
            for a in range(p):
                if not horton2d_check(residue_slice(H, a, p)).accepted:
                    failures.append(f"slice n={n} a={a} p={p}")
    rng = random.Random(2024)
    accepted = 0
    while accepted < 50:
        pts = random_horton(rng, rng.randint(8, 32))
        if not (horton2d_check(LevelledSet.along_axis(pts, 0, d=2)).accepted and in_general_position_2d(pts)):
            continue
        accepted += 1
        if not closed_check(pts, 4, "both")[0]:
            failures.append(f"random set {accepted} not 4-closed")
        if largest_empty_convex_bruteforce(pts) >= 7:
            failures.append(f"random set {accepted} has a 7-hole")
    report(3, not failures, f"13 generated sets with all slices p<=8, 50 random accepted sets; failures: {failures[:3]}")


# 4 ------------------------------------------------------------------------------------------

def test_c4_lattice_classification(report):
    rng = random.Random(4)
    pool = [(x, y) for x in range(6) for y in range(6)]
    agree = 0
    for _ in range(1000):
        S = rng.sample(pool, rng.randint(7, 10))
        res = classify_interior_or_two_lines(S)
        kind = "interior" if isinstance(res, InteriorLatticePoint) else "lines"
        agree += validate_classification(S, res) and classification_oracle(S) == kind
    report(4, agree == 1000, f"{agree}/1000 certificates validated by the oracle")


# 5 ------------------------------------------------------------------------------------------

def test_c5_cube_reduction(report):
    rng = random.Random(5)
    done = bad = 0
    while done < 200:
        d = 2 if done < 100 else 3
        basis = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(d)]
        c = Cube(tuple(rng.randint(-5, 5) for _ in range(d)), basis, rng.randint(1, 6))
        if c.determinant() == 0:
            continue
        out = basic_cube_reduce(c)
        inside = all(all(0 <= t <= c.length for t in cube_coefficients(c, v)) for v in out.corners())
        bad += not (abs(out.determinant()) == 1 and out.length == c.length // d and inside)
        done += 1
    report(5, bad == 0, f"200 cubes (d=2,3; r<=6), {bad} failures")


# 6 ------------------------------------------------------------------------------------------

def test_c6_pigeonhole_cube(report):
    rng = random.Random(6)
    grid = [(x, y) for x in range(61) for y in range(61)]
    kinds, bad = {"cube": 0, "hyperplane": 0}, 0
    for _ in range(20):
        S = rng.sample(grid, 448)
        cert = find_basic_cube(S, 1, 7, 2)
        if isinstance(cert, HyperplaneCertificate):
            kinds["hyperplane"] += 1
            on = [q for q in S if sum(a * b for a, b in zip(cert.normal, q)) == cert.offset]
            bad += not (any(cert.normal) and len(on) >= 7 and set(cert.points) <= set(on))
        else:
            kinds["cube"] += 1
            bad += not (abs(cert.determinant()) == 1 and cert.length == 1 and
                        all(interior_contains(S, v) for v in cert.corners()))
    report(6, bad == 0, f"20 subsets, certificates {kinds}, {bad} invalid")


# 7 ------------------------------------------------------------------------------------------

def test_c7_hd_structural_suite(report, tmp_path):
    t0 = time.time()
    out = tmp_path / "box.pts"
    r = cli("--seed", "0", "gend", "--box", "80x4x4", "--eps", "1/10", "--out", str(out))
    t_gen = time.time() - t0
    assert r.returncode == 0, r.stderr
    man = json.loads((tmp_path / "box.pts.manifest.json").read_text())
    assert replay_manifest(man).dumps() == out.read_text()
    box = tuple(man["parameters"]["box"])
    stages = [stage_from_json(o, box) for o in man["stage_log"]]
    f = PointSetFile.read(out)
    fam = PerturbedFamily(box, dict(zip(f.indices, f.points)), stages, F(1, 10))
    neg = verify_negligibility_hd(fam, 5, 500, 0)
    scan = window_interior_scan(fam, 0, constants(3).N[0])
    eps_ok = all(sq_dist(p, x) < F(1, 100) for x, p in fam.points.items())
    dt = time.time() - t0
    ok = eps_ok and not scan["failures"] and scan["windows"] == 16 * 13 and dt < 1800
    pairs = sum(v["interior_pairs"] for v in neg.values())
    report(7, ok, f"gend {t_gen:.0f}s; negligible on {pairs} interior pairs; "
                  f"{scan['windows']} windows of 68, {len(scan['failures'])} empty; total {dt:.0f}s")


# 8 ------------------------------------------------------------------------------------------

def circle_points(seed, count=12, R=100):
    rng = random.Random(seed)
    S = []
    for k in range(count):
        th = 2 * math.pi * k / count + rng.uniform(-0.03, 0.03)
        t = F(math.tan(th / 2)).limit_denominator(1000)
        S.append((R * (1 - t * t) / (1 + t * t), 2 * R * t / (1 + t * t)))
    return S


def test_c8_completion(report):
    t0 = time.time()
    S = circle_points(0)
    assert all(x * x + y * y == 100 ** 2 for x, y in S) and general_position(S)
    T, info = complete_superset(S, 2, F(1, 10))
    Q = [q for q in T if q not in set(S)]
    pierced = all(any(interior_contains(list(A), q) for q in Q) for A in itertools.combinations(S, 3))
    big = largest_empty_convex_polygon_2d(T).largest_size
    dt = time.time() - t0
    ok = set(S) <= set(T) and pierced and general_position(T) and big <= 8 and len(T) <= 1200 and dt < 600
    report(8, ok, f"|T|={len(T)}, all 220 triangles pierced={pierced}, largest hole {big}, {dt:.0f}s")


# 9 ------------------------------------------------------------------------------------------

def test_c9_constants(report):
    c2, c3 = constants(2), constants(3)
    ok = c2.C_prime == 640 and c2.planar_override == (7, 9) and c3.N[0] == 68
    ok &= all(constants(d).N == constants_oracle(d) and constants(d).C == constants_oracle(d)[-1] + d
              for d in range(2, 7))
    report(9, ok, f"C'_2(general)={c2.C_prime}, N_1(3)={c3.N[0]}, d<=6 recursion matches")


# 10 -----------------------------------------------------------------------------------------

def test_c10_spread(report):
    fam = build_planar(16, F(1, 10), check_holes=False)
    q = spread(fam.point_list()).ratio_sq
    # q <= (15 sqrt2 + 1/5)^2 / (4/5)^2  <=>  q*16/25 - 450 - 1/25 <= 6 sqrt2
    lhs = q * F(16, 25) - 450 - F(1, 25)
    ok = lhs <= 0 or lhs * lhs <= 72
    report(10, ok, f"ratio_sq = {float(q):.4f}, bound = {(15 * 2 ** 0.5 + 0.2) ** 2 / 0.64:.4f}")


# 11 -----------------------------------------------------------------------------------------

def test_c11_oracle_equivalence(report):
    t0 = time.time()
    rng = random.Random(11)
    agree = 0
    for k in range(200):
        n = rng.randint(3, 14)
        if k % 4:
            while True:
                P = list({(rng.randint(0, 50), rng.randint(0, 50)) for _ in range(n)})
                if in_general_position_2d(P):
                    break
            ref = largest_empty_convex_bruteforce(P)
        else:
            P = list({(rng.randint(0, 5), rng.randint(0, 5)) for _ in range(n)})
            ref = brute_force_largest_empty_2d_masks(P)
        agree += largest_empty_convex_polygon_2d(P).largest_size == ref
    dt = time.time() - t0
    report(11, agree == 200 and dt < 300, f"{agree}/200 agree, {dt:.0f}s")
