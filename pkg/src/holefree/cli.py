"""``holefree`` command line.  Exit codes: 0 ok, 1 verification failure,
2 usage or parse error."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .io import (
    PointFileError,
    PointSetFile,
    dump_manifest,
    family_file,
    family_manifest,
    format_rational,
    parse_rational,
    svg_scatter,
)

DEFAULT_SEED = 0


def _rational(s: str) -> Fraction:
    try:
        return parse_rational(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from None


def _box(s: str) -> tuple:
    try:
        box = tuple(int(t) for t in s.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad box {s!r}, expected N1xN2x...") from None
    if not box or min(box) < 1:
        raise argparse.ArgumentTypeError(f"bad box {s!r}")
    return box


def _vec(s: str) -> tuple:
    try:
        return tuple(int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer vector {s!r}") from None


def _fmt_point(p) -> str:
    return "(" + ", ".join(format_rational(c) for c in p) + ")"


def _emit(fam_file: PointSetFile, out: str | None, manifest: dict | None):
    if out:
        fam_file.write(out)
        if manifest is not None:
            dump_manifest(manifest, out + ".manifest.json")
        print(f"wrote {fam_file.k} points to {out}")
    else:
        sys.stdout.write(fam_file.dumps())


def cmd_gen2d(a) -> int:
    from .construction import VerificationFailure, build_planar

    try:
        fam = build_planar(a.n, a.eps, check_holes=not a.no_hole_check, seed=a.seed)
    except VerificationFailure as e:
        print(f"verification failed: {e}; attempts {e.witness}", file=sys.stderr)
        return 1
    m = family_manifest(fam, "planar", {"seed": a.seed, "n": a.n})
    _emit(family_file(fam), a.out, m)
    return 0


def cmd_gend(a) -> int:
    from .construction import VerificationFailure, build_hd

    budget = {"random_subsets": a.budget, "horton_window": a.horton_window}
    try:
        fam = build_hd(a.box, a.eps, budget, seed=a.seed)
    except VerificationFailure as e:
        print(f"verification failed: {e}; witness {e.witness}", file=sys.stderr)
        return 1
    m = family_manifest(fam, "hd", {"seed": a.seed, "budget": budget})
    _emit(family_file(fam), a.out, m)
    return 0


def cmd_complete(a) -> int:
    from .construction import complete_superset

    S = PointSetFile.read(a.input)
    if S.d != a.d:
        print(f"file dimension {S.d} differs from --d {a.d}", file=sys.stderr)
        return 2
    try:
        T, info = complete_superset(S.points, a.d, a.eps, seed=a.seed)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 1
    _emit(PointSetFile(a.d, T), a.out, None)
    print(f"grid {info.get('n')} pitch {info.get('pitch')}", file=sys.stderr)
    return 0


def cmd_holes(a) -> int:
    from .holes import empirical_largest_hole_hd, is_hole_free, largest_empty_convex_polygon_2d

    P = PointSetFile.read(a.input)
    if a.ell is not None:
        try:
            ok, w = is_hole_free(P.points, a.ell, a.convex_witness_only)
        except RuntimeError as e:
            print(str(e))
            return 1
        if ok:
            print(f"{a.ell}-hole-free: yes")
            return 0
        print(f"{a.ell}-hole-free: no")
        print("witness: " + " ".join(_fmt_point(p) for p in w))
        return 1
    rep = (largest_empty_convex_polygon_2d(P.points) if P.d == 2
           else empirical_largest_hole_hd(P.points, seed=a.seed))
    bound = " (lower bound)" if rep.is_lower_bound else ""
    print(f"largest hole: {rep.largest_size}{bound}")
    print(f"method: {rep.method}")
    print("witness: " + " ".join(_fmt_point(p) for p in rep.witness))
    print(f"certificate: {rep.emptiness_certificate}")
    return 0


def cmd_check_horton(a) -> int:
    from .horton import horton2d_check, horton_hd_check
    from .levelled import LevelledSet

    P = PointSetFile.read(a.input)
    H = LevelledSet.along_axis(P.points, 0, d=P.d)
    if a.planar:
        if P.d != 2:
            print("--planar needs a 2D file", file=sys.stderr)
            return 2
        rep = horton2d_check(H)
    else:
        if a.k is None:
            print("give --planar or --k with --primes", file=sys.stderr)
            return 2
        try:
            rep = horton_hd_check(H, a.k, tuple(a.primes or ()))
        except ValueError as e:
            print(str(e), file=sys.stderr)
            return 2
    verdict = {True: "accepted", False: "rejected", None: "indeterminate"}[rep.accepted]
    print(f"{verdict}; complexity {rep.complexity}; trace depth {rep.depth}")
    if rep.reason:
        print(f"reason: {rep.reason}")
    return 0 if rep.accepted else 1


def cmd_classify(a) -> int:
    from .levelled import InteriorLatticePoint, classify_interior_or_two_lines

    S = PointSetFile.read(a.input)
    pts = [tuple(int(c) for c in p) for p in S.points]
    if any(Fraction(c).denominator != 1 for p in S.points for c in p):
        print("classify-lattice needs integer points", file=sys.stderr)
        return 2
    try:
        res = classify_interior_or_two_lines(pts)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    if isinstance(res, InteriorLatticePoint):
        print(f"interior lattice point {_fmt_point(res.point)}")
    else:
        (a1, b1, c1), (a2, b2, c2) = res.line1, res.line2
        print(f"two parallel lines: {a1}x + {b1}y = {c1}; {a2}x + {b2}y = {c2}")
    return 0


def cmd_cube_reduce(a) -> int:
    from .levelled import Cube, basic_cube_reduce

    try:
        c = Cube(a.origin, list(a.basis), a.r)
        out = basic_cube_reduce(c)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    print(f"origin {','.join(map(str, out.origin))}")
    print("basis " + " ".join(",".join(map(str, v)) for v in out.basis))
    print(f"length {out.length}; det {out.determinant()}")
    return 0


def cmd_spread(a) -> int:
    from .holes import spread

    P = PointSetFile.read(a.input)
    try:
        v = spread(P.points)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    print(f"max squared distance {format_rational(v.max_sq_dist)}")
    print(f"min squared distance {format_rational(v.min_sq_dist)}")
    print(f"squared spread {format_rational(v.ratio_sq) if v.ratio_sq is not None else 'inf'}")
    print(f"spread ~ {float(v.ratio_sq) ** 0.5:.6g}" if v.ratio_sq is not None else "spread inf")
    return 0


def cmd_constants(a) -> int:
    from .construction import constants

    try:
        t = constants(a.d)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    if a.json:
        print(json.dumps({"d": t.d, "primes": t.primes, "N": t.N, "C_prime": t.C_prime, "C": t.C,
                          "planar_override": t.planar_override}))
        return 0
    print(f"d = {t.d}; primes {t.primes}")
    for k, n in enumerate(t.N, 1):
        print(f"N_{k} = {n}")
    if t.planar_override:
        print(f"C'_2(planar) = {t.planar_override[0]}")
        print(f"C_2(planar) = {t.planar_override[1]}")
    print(f"C'_{t.d}(general) = {t.C_prime}")
    print(f"C_{t.d}(general) = {t.C}")
    return 0


def cmd_plot(a) -> int:
    P = PointSetFile.read(a.input)
    if P.d != 2:
        print("plot needs a 2D file", file=sys.stderr)
        return 2
    hl = PointSetFile.read(a.highlight).points if a.highlight else None
    Path(a.out).write_text(svg_scatter(P.points, hl))
    print(f"wrote {a.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holefree", description=" ".join(__doc__.split()))
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help=f"seed for randomized verification (default {DEFAULT_SEED})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen2d", help="planar perturbed grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--out")
    p.add_argument("--no-hole-check", action="store_true", help="skip the exact hole search")
    p.set_defaults(fn=cmd_gen2d)

    p = sub.add_parser("gend", help="perturbed box in any dimension")
    p.add_argument("--box", type=_box, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--budget", type=int, default=500, help="random global subsets per stage")
    p.add_argument("--horton-window", type=int, default=24)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gend)

    p = sub.add_parser("complete", help="superset completion of a point set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=_rational, default=Fraction(1, 10))
    p.add_argument("--out")
    p.set_defaults(fn=cmd_complete)

    p = sub.add_parser("holes", help="hole search")
    p.add_argument("--in", dest="input", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ell", type=int)
    g.add_argument("--largest", action="store_true")
    p.add_argument("--convex-witness-only", action="store_true")
    p.set_defaults(fn=cmd_holes)

    p = sub.add_parser("check-horton", help="Horton checkers")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--planar", action="store_true")
    p.add_argument("--k", type=int)
    p.add_argument("--primes", type=int, nargs="*")
    p.set_defaults(fn=cmd_check_horton)

    p = sub.add_parser("classify-lattice", help="interior lattice point or two lines")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("cube-reduce", help="basic sub-cube of a lattice cube")
    p.add_argument("--origin", type=_vec, required=True)
    p.add_argument("--basis", type=_vec, nargs="+", required=True, help="one comma vector per edge")
    p.add_argument("--r", type=int, required=True, help="cube length")
    p.set_defaults(fn=cmd_cube_reduce)

    p = sub.add_parser("spread", help="max over min pairwise distance")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(fn=cmd_spread)

    p = sub.add_parser("constants", help="hole-size constants")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("plot", help="SVG scatter of a 2D file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--highlight")
    p.set_defaults(fn=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.fn(a)
    except PointFileError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
