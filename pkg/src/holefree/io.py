"""Point-set files, generation manifests and SVG scatter plots.

Point-set grammar (one item per line, ``#`` starts a comment)::

    d <dimension>
    k <count>
    box <n_1> ... <n_d>          optional; records then carry an index
    [<i_1> ... <i_d> :] <c_1> ... <c_d>

Coordinates are exact rationals ``num/den`` (``/den`` omitted when 1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .geometry import as_point


class PointFileError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def format_rational(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rational(tok: str) -> Fraction:
    if "/" in tok:
        a, b = tok.split("/", 1)
        if not b or b.startswith(("-", "+")):
            raise ValueError(tok)
        return Fraction(int(a), int(b))
    return Fraction(int(tok))


@dataclass
class PointSetFile:
    d: int
    points: list
    box: tuple | None = None
    indices: list | None = None

    @property
    def k(self) -> int:
        return len(self.points)

    def dumps(self) -> str:
        lines = ["# holefree point set", f"d {self.d}", f"k {self.k}"]
        if self.box is not None:
            lines.append("box " + " ".join(map(str, self.box)))
        for n, p in enumerate(self.points):
            coords = " ".join(format_rational(c) for c in p)
            if self.indices is not None:
                lines.append(" ".join(map(str, self.indices[n])) + " : " + coords)
            else:
                lines.append(coords)
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "PointSetFile":
        d = k = None
        box = None
        pts, idx = [], []
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head = line.split()
            if head[0] in ("d", "k", "box"):
                try:
                    vals = [int(t) for t in head[1:]]
                except ValueError:
                    raise PointFileError(f"bad header {head[0]!r}", ln) from None
                if head[0] == "d":
                    if len(vals) != 1 or vals[0] < 1:
                        raise PointFileError("bad dimension", ln)
                    d = vals[0]
                elif head[0] == "k":
                    if len(vals) != 1 or vals[0] < 0:
                        raise PointFileError("bad count", ln)
                    k = vals[0]
                else:
                    if not vals or min(vals) < 1:
                        raise PointFileError("bad box", ln)
                    box = tuple(vals)
                continue
            if d is None:
                raise PointFileError("record before the 'd' header", ln)
            if ":" in line:
                if box is None:
                    raise PointFileError("index given without a 'box' header", ln)
                left, right = line.split(":", 1)
                try:
                    ix = tuple(int(t) for t in left.split())
                except ValueError:
                    raise PointFileError("bad index", ln) from None
                if len(ix) != len(box):
                    raise PointFileError("index length does not match box", ln)
                idx.append(ix)
                toks = right.split()
            else:
                if box is not None:
                    raise PointFileError("missing index for boxed family", ln)
                toks = head
            if len(toks) != d:
                raise PointFileError(f"expected {d} coordinates, got {len(toks)}", ln)
            try:
                pts.append(as_point([parse_rational(t) for t in toks]))
            except (ValueError, ZeroDivisionError):
                raise PointFileError("bad coordinate", ln) from None
        if d is None:
            raise PointFileError("missing 'd' header")
        if k is not None and k != len(pts):
            raise PointFileError(f"header says {k} points, found {len(pts)}")
        return cls(d, pts, box, idx if box is not None else None)

    @classmethod
    def read(cls, path) -> "PointSetFile":
        return cls.loads(Path(path).read_text())


def family_file(fam) -> PointSetFile:
    idx = list(fam.indices())
    return PointSetFile(fam.d, [fam.points[x] for x in idx], tuple(fam.index_box), idx)


# --- manifests -------------------------------------------------------------------


def _jsonable(o):
    if isinstance(o, Fraction):
        return format_rational(o)
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (str, int, float, bool)) or o is None:
        return o
    return str(o)


def family_manifest(fam, generator: str, params: dict) -> dict:
    from .construction import first_primes

    return {
        "generator": {"name": generator, "version": __version__},
        "parameters": _jsonable({
            "d": fam.d,
            "box": list(fam.index_box),
            "epsilon_target": fam.epsilon,
            "primes": first_primes(fam.d),
            **params,
        }),
        "verification": _jsonable(fam.verification),
        "stage_log": [st.to_json() for st in fam.stage_log],
    }


def dump_manifest(m: dict, path) -> None:
    Path(path).write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")


def stage_from_json(obj: dict, box: Sequence[int]):
    from .construction import StagePlan, make_stage
    from .horton import DigitExpansion

    i, j = obj["stage"]
    mag = parse_rational(obj["magnitude"])
    if "table" in obj:
        raw = {int(x): parse_rational(v) for x, v in obj["table"].items()}
        return StagePlan(i, j, None, mag, {x: mag * v for x, v in raw.items()}, raw)
    if obj.get("base") is not None:
        e = DigitExpansion(obj["base"], parse_rational(obj["epsilon"]), obj["spacing"])
        return make_stage(i, j, box[i - 1], e, mag)
    return make_stage(i, j, box[i - 1], None, 0)


def replay_manifest(m: dict) -> PointSetFile:
    """Rebuild the family's point file from the stage log alone."""
    from .construction import apply_stages

    box = tuple(m["parameters"]["box"])
    stages = [stage_from_json(o, box) for o in m["stage_log"]]
    pts = apply_stages(box, stages)
    idx = sorted(pts, key=lambda x: x)
    return PointSetFile(len(box), [pts[x] for x in idx], box, idx)


# --- svg ---------------------------------------------------------------------------


def svg_scatter(points: Sequence[Sequence], highlight: Sequence[Sequence] | None = None,
                size: int = 600, radius: float = 2.5) -> str:
    pts = [(float(p[0]), float(p[1])) for p in points]
    hl = [(float(p[0]), float(p[1])) for p in (highlight or [])]
    allp = pts + hl
    if allp:
        x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
        y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    else:
        x0 = y0 = 0.0
        x1 = y1 = 1.0
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 10

    def tr(p):
        return (pad + (p[0] - x0) / span * (size - 2 * pad),
                size - pad - (p[1] - y0) / span * (size - 2 * pad))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    if len(hl) >= 2:
        # order the witness around its centroid so the outline is simple
        import math

        cx = sum(p[0] for p in hl) / len(hl)
        cy = sum(p[1] for p in hl) / len(hl)
        ring = sorted(hl, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        coords = " ".join("%.3f,%.3f" % tr(p) for p in ring)
        out.append(f'<polygon points="{coords}" fill="rgba(220,60,60,0.2)" stroke="crimson"/>')
    for p in pts:
        x, y = tr(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
