import json
import re
import subprocess
import sys

import numpy as np
import pytest

from radiusum.cli import (EXIT_CHECK_FAILED, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, RunConfig,
                          InputError, run)
from radiusum.output import emit_json, format_cover_text, render_svg, solution_record
from radiusum.metric import build_instance
from radiusum.solver import solve_general


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


@pytest.fixture
def line_file(write):
    return write("line.txt", "0\n1\n3\n")


def test_radii_text(line_file, capsys):
    assert run([line_file]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["r[0]=1", "r[1]=0", "r[2]=2", "total=3"]


def test_cover_text(line_file, capsys):
    assert run([line_file, "--mode", "cover"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == [
        "edge 0 1 x1", "edge 0 2 x1", "edge 1 2 x1", "weight=6"]


def test_star_text(write, capsys):
    assert run([write("two.txt", "0\n4\n"), "--mode", "star"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "total=4"
    h = [float(line.split("=")[1]) for line in out[:2]]
    assert h[0] + h[1] == 4


def test_matrix_input(write, capsys):
    path = write("m.txt", "3\n0 1 3\n1 0 2\n3 2 0\n")
    assert run([path, "--metric", "matrix"]) == EXIT_OK
    assert capsys.readouterr().out.endswith("total=3\n")


def test_norm_option(write, capsys):
    assert run([write("p.txt", "0 0\n3 4\n"), "--metric", "l1"]) == EXIT_OK
    assert capsys.readouterr().out.endswith("total=7\n")


def test_min_radius_infeasible(line_file, capsys):
    assert run([line_file, "--min-radius", "0.6"]) == EXIT_INFEASIBLE
    assert "infeasible" in capsys.readouterr().err


def test_min_radius_json(line_file, capsys):
    assert run([line_file, "--min-radius", "0.5", "--format", "json", "--check"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert rec["min_radius"] == 0.5
    assert min(rec["radii"]) >= 0.5
    assert rec["certificate"] == "certified-optimal"


@pytest.mark.parametrize("argv", [
    ["missing-file.txt"],
    ["{line}", "--metric", "l9"],
    ["{line}", "--mode", "star", "--min-radius", "1"],
    ["{line}", "--metric", "matrix"],
    ["{line}", "--min-radius", "-1"],
    ["{line}", "--format", "svg"],
    ["{line}", "--bogus"],
])
def test_input_errors(line_file, argv, capsys):
    argv = [a.format(line=line_file) for a in argv]
    assert run(argv) == EXIT_INPUT
    assert capsys.readouterr().err.strip()


def test_matrix_with_geometric_rejected():
    with pytest.raises(InputError):
        RunConfig("x", metric="matrix", accel="geometric").validate()


def test_check_flag(line_file, capsys):
    assert run([line_file, "--check"]) == EXIT_OK


def test_check_failure_exit(line_file, monkeypatch, capsys):
    import radiusum.cli as cli
    monkeypatch.setattr(cli, "_verify", lambda *a: ["forced failure"])
    assert run([line_file, "--check"]) == EXIT_CHECK_FAILED
    assert "check failed" in capsys.readouterr().err


def test_out_file(line_file, tmp_path, capsys):
    out = tmp_path / "o.txt"
    assert run([line_file, "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert out.read_text().endswith("total=3\n")


def test_json_schema(line_file, capsys):
    assert run([line_file, "--format", "json"]) == EXIT_OK
    text = capsys.readouterr().out
    rec = json.loads(text)
    assert list(rec) == ["n", "value", "radii", "cover", "duals", "certificate"]
    assert rec["value"] == 3 and rec["radii"] == [1, 0, 2]
    assert rec["cover"] == [[0, 1, 1], [0, 2, 1], [1, 2, 1]]
    assert set(rec["duals"]) == {"a", "b"}


def test_star_json(write, capsys):
    assert run([write("two.txt", "0\n4\n"), "--mode", "star", "--format", "json"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert sum(rec["h"]) == 4 and rec["total_h"] == 4


def test_json_round_trip_bit_exact(rng):
    inst = build_instance(rng.random((25, 2)))
    sol = solve_general(inst)
    rec = solution_record(inst.n, sol.value, sol.radii, sol.cover, sol.a, sol.b, "x")
    back = json.loads(emit_json(rec))
    assert back["value"] == sol.value
    assert np.array_equal(np.array(back["radii"]), sol.radii)
    assert np.array_equal(np.array(back["duals"]["a"]), sol.a)
    assert np.array_equal(np.array(back["duals"]["b"]), sol.b)


def test_json_rejects_nonfinite():
    with pytest.raises(ValueError):
        emit_json({"value": float("nan")})


def test_format_cover_none():
    assert format_cover_text(None) == "weight=0\n"


def test_svg_counts(rng):
    pts = rng.random((20, 2))
    inst = build_instance(pts)
    sol = solve_general(inst)
    svg = render_svg(pts, sol.radii, sol.cover)
    assert svg.count("<circle") == 20
    assert svg.count('<g class="edge"') == len(sol.cover.edges)
    lines = sum(k for _, _, k in sol.cover.edges)
    assert svg.count("<line") == lines


def test_svg_unit_square(write, capsys):
    path = write("sq.txt", "0 0\n1 0\n1 1\n0 1\n")
    assert run([path, "--format", "svg"]) == EXIT_OK
    svg = capsys.readouterr().out
    assert re.findall(r'class="disk"[^>]* r="([^"]+)"', svg) == ["0.5"] * 4
    assert svg.count('<g class="edge"') == 2
    assert svg.count('data-mult="2"') == 2


def test_svg_dot_for_zero_radius(write, capsys):
    assert run([write("p.txt", "0 0\n1 0\n3 0\n"), "--format", "svg"]) == EXIT_OK
    svg = capsys.readouterr().out
    assert svg.count('class="dot"') == 1
    assert 'class="dot" data-i="1"' in svg


def test_svg_viewbox_margin():
    svg = render_svg(np.array([[0.0, 0.0], [10.0, 0.0]]), [5.0, 5.0])
    x0, y0, w, h = map(float, re.search(r'viewBox="([^"]+)"', svg).group(1).split())
    # Margin is 5% of the larger extent, on every side.
    assert (x0, w) == pytest.approx((-6.0, 22.0))
    assert (y0, h) == pytest.approx((-6.0, 12.0))


def test_svg_needs_2d():
    with pytest.raises(ValueError):
        render_svg(np.zeros((3, 3)), [0, 0, 0])


@pytest.mark.parametrize("fmt", ["json", "svg", "text"])
def test_deterministic(rng, write, tmp_path, fmt):
    path = write("pts.txt", "\n".join(f"{x!r} {y!r}" for x, y in rng.random((150, 2)).tolist()))
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert run([path, "--format", fmt, "--seed", "5", "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_auto_accel_threshold(rng, write, capsys):
    import radiusum.cli as cli
    small = build_instance(rng.random((63, 2)))
    big = build_instance(rng.random((64, 2)))
    cfg = RunConfig("x")
    assert not cli._use_geometric(cfg, small)
    assert cli._use_geometric(cfg, big)
    assert not cli._use_geometric(RunConfig("x", accel="general"), big)


def test_module_entry_point(line_file):
    res = subprocess.run([sys.executable, "-m", "radiusum", line_file],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.endswith("total=3\n")
