import json
import random
import subprocess
import sys
from fractions import Fraction as F

import pytest

from holefree.cli import main
from holefree.construction import build_hd, build_planar
from holefree.io import (
    PointFileError,
    PointSetFile,
    family_file,
    family_manifest,
    format_rational,
    parse_rational,
    replay_manifest,
    svg_scatter,
)


def run(*args):
    return subprocess.run([sys.executable, "-m", "holefree.cli", *args], capture_output=True, text=True)


def test_rational_tokens():
    assert format_rational(F(3)) == "3" and format_rational(F(-7, 4)) == "-7/4"
    assert parse_rational("-7/4") == F(-7, 4)
    for bad in ("1/0", "x", "1/-2", "1.5"):
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_rational(bad)


def test_round_trip_random_towers():
    rng = random.Random(12)
    for _ in range(30):
        d = rng.randint(1, 4)
        pts = []
        for _ in range(rng.randint(0, 12)):
            p = []
            for _ in range(d):
                v = F(rng.randint(-50, 50))
                for k in range(rng.randint(0, 6)):
                    v += F(rng.randint(-3, 3), 2 ** (rng.randint(1, 200) * (k + 1)))
                p.append(v)
            pts.append(tuple(p))
        f = PointSetFile(d, pts)
        g = PointSetFile.loads(f.dumps())
        assert [tuple(map(F, p)) for p in g.points] == [tuple(map(F, p)) for p in pts]
        assert g.dumps() == f.dumps()


def test_round_trip_family():
    fam = build_planar(4, F(1, 10))
    f = family_file(fam)
    g = PointSetFile.loads(f.dumps())
    assert g.box == (4, 4) and g.indices == f.indices and g.points == f.points


@pytest.mark.parametrize("text,line", [
    ("1 2\n", 1),
    ("d 2\n1 2 3\n", 2),
    ("d 2\n# c\n1 x\n", 3),
    ("d 2\nk 3\n1 2\n", None),
    ("d 2\n1 2 : 3 4\n", 2),
    ("d 2\nbox 2 2\n1 2\n", 3),
    ("d zero\n", 1),
])
def test_parse_errors_name_line(text, line):
    with pytest.raises(PointFileError) as e:
        PointSetFile.loads(text)
    assert e.value.line == line


def test_manifest_replay_bit_exact():
    for fam, gen in ((build_planar(5, F(1, 10)), "planar"), (build_hd((6, 3, 3), F(1, 10)), "hd")):
        m = json.loads(json.dumps(family_manifest(fam, gen, {"seed": 0})))
        assert replay_manifest(m).dumps() == family_file(fam).dumps()
        assert replay_manifest(m).dumps() == replay_manifest(m).dumps()


def test_svg_counts_circles():
    pts = [(0, 0), (1, 2), (F(5, 2), 1)]
    svg = svg_scatter(pts, highlight=pts[:3])
    assert svg.startswith("<svg") and svg.count("<circle") == 3 and "<polygon" in svg


def test_cli_constants(capsys):
    assert main(["constants", "--d", "2"]) == 0
    out = capsys.readouterr().out
    assert "7" in out and "9" in out and "640" in out
    assert main(["constants", "--d", "3", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["N"][0] == 68


def test_cli_pipeline(tmp_path):
    pts = tmp_path / "p.pts"
    assert run("gen2d", "--n", "6", "--eps", "1/10", "--out", str(pts)).returncode == 0
    man = json.loads((tmp_path / "p.pts.manifest.json").read_text())
    assert replay_manifest(man).dumps() == pts.read_text()
    r = run("holes", "--in", str(pts), "--largest")
    assert r.returncode == 0 and "largest" in r.stdout
    svg = tmp_path / "p.svg"
    assert run("plot", "--in", str(pts), "--out", str(svg)).returncode == 0
    assert svg.read_text().count("<circle") == 36
    assert run("spread", "--in", str(pts)).returncode == 0


def test_cli_exit_codes(tmp_path):
    assert run("no-such-command").returncode == 2
    assert run("gen2d", "--n").returncode == 2
    bad = tmp_path / "bad.pts"
    bad.write_text("d 2\n1 2\n3\n")
    r = run("spread", "--in", str(bad))
    assert r.returncode == 2 and "line 3" in r.stderr
    sq = tmp_path / "sq.pts"
    PointSetFile(2, [(0, 0), (4, 0), (4, 4), (0, 4)]).write(sq)
    assert run("holes", "--in", str(sq), "--ell", "4").returncode == 1
    assert run("holes", "--in", str(sq), "--ell", "5").returncode == 0


def test_cli_small_commands(tmp_path):
    s = tmp_path / "s.pts"
    PointSetFile(2, [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1)]).write(s)
    r = run("classify-lattice", "--in", str(s))
    assert r.returncode == 0 and "line" in r.stdout.lower()
    r = run("cube-reduce", "--origin", "0,0", "--basis", "1,0", "1,2", "--r", "4")
    assert r.returncode == 0
    h = tmp_path / "h.pts"
    PointSetFile(2, [(x, F(x % 2)) for x in range(1, 5)]).write(h)
    assert run("check-horton", "--in", str(h), "--planar").returncode == 0
    PointSetFile(2, [(x, 0) for x in range(1, 5)]).write(h)
    assert run("check-horton", "--in", str(h), "--planar").returncode == 1


def test_cli_bad_levels_is_usage_error(tmp_path):
    p = tmp_path / "q.pts"
    PointSetFile(2, [(F(1, 2), 0), (F(3, 2), 1)]).write(p)
    r = run("check-horton", "--in", str(p), "--planar")
    assert r.returncode == 2 and "not an integer" in r.stderr
