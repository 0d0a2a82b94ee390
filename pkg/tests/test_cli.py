import json
import math

import pytest

from chessbilliard.cli import main, parse_angle, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_angle():
    assert parse_angle("atan:1/3") == pytest.approx(math.atan(1 / 3))
    assert parse_angle("atan:-2/3") == pytest.approx(math.pi - math.atan(2 / 3))
    assert parse_angle("3pi/4") == pytest.approx(3 * math.pi / 4)
    assert parse_angle("pi") == pytest.approx(math.pi)
    assert parse_angle("0.25") == 0.25
    assert parse_grid("100x20") == (100, 20)


def test_rho_circle(capsys):
    code, out, _ = run(capsys, "rho", "--domain", '{"kind": "circle", "r": 1}', "--theta1", "0", "--theta2", "pi/3")
    assert code == 0
    first, second = out.splitlines()
    assert first == "rho=0.333333 p/q=1/3"
    rec = json.loads(second)
    assert (rec["p"], rec["q"]) == (1, 3)
    assert set(rec) >= {"theta1", "theta2", "rho", "err", "p", "q"}


def orbit_records(out):
    return [json.loads(line) for line in out.splitlines()]


def test_orbit_circle_closes(capsys):
    code, out, _ = run(capsys, "orbit", "--domain", '{"kind": "circle"}', "--theta1", "0", "--theta2", "pi/3", "--steps", "6", "--map", "S")
    recs = orbit_records(out)
    assert code == 0 and len(recs) == 7
    assert set(recs[0]) == {"step", "copy", "s", "x", "y"}
    d = abs(recs[-1]["s"] - recs[0]["s"]) % (2 * math.pi)
    assert min(d, 2 * math.pi - d) < 1e-9


def test_orbit_square_period_two(capsys):
    _, out, _ = run(capsys, "orbit", "--theta1", "pi/4", "--theta2", "3pi/4", "--start", "0.37", "--steps", "2", "--map", "S")
    recs = orbit_records(out)
    assert recs[2]["s"] == pytest.approx(recs[0]["s"], abs=1e-9)


def test_orbit_equal_directions_fixed(capsys):
    _, out, _ = run(capsys, "orbit", "--theta1", "0.5", "--theta2", "0.5", "--start", "1.3", "--steps", "3", "--map", "S")
    assert all(r["s"] == pytest.approx(1.3) for r in orbit_records(out))


def test_orbit_writes_figure(capsys, tmp_path):
    out = tmp_path / "orbit.jsonl"
    run(capsys, "orbit", "--theta1", "atan:1/3", "--theta2", "atan:-2/3", "--start", "1.5", "--steps", "6", "--out", str(out))
    assert len(out.read_text().splitlines()) == 7
    assert out.with_suffix(".png").exists()


def test_scan_outputs(capsys, tmp_path):
    out = tmp_path / "grid.csv"
    args = ["scan", "--grid", "6x4", "--iters", "5000", "--out", str(out)]
    code, stdout, _ = run(capsys, *args)
    assert code == 0 and "24 cells" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == "theta1,theta2,rho,err,p,q" and len(lines) == 25
    pgm = out.with_suffix(".pgm").read_bytes()
    assert pgm.startswith(b"P5\n6 4\n255\n") and len(pgm) == len(b"P5\n6 4\n255\n") + 24
    meta = json.loads((tmp_path / "grid.csv.meta.json").read_text())
    assert meta["cells"] == 24 and meta["iters"] == 5000
    assert out.with_suffix(".png").exists()
    first = [out.read_bytes(), out.with_suffix(".pgm").read_bytes(), (tmp_path / "grid.csv.meta.json").read_bytes()]
    run(capsys, *args)
    again = [out.read_bytes(), out.with_suffix(".pgm").read_bytes(), (tmp_path / "grid.csv.meta.json").read_bytes()]
    assert first == again


def test_scan_json_format(capsys, tmp_path):
    out = tmp_path / "grid.json"
    run(capsys, "scan", "--grid", "2x2", "--iters", "2000", "--format", "json", "--no-figure", "--out", str(out))
    data = json.loads(out.read_text())
    assert len(data["cells_data"]) == 4
    assert not out.with_suffix(".png").exists()


def test_tongue(capsys):
    code, out, _ = run(capsys, "tongue", "--domain", '{"kind": "circle"}', "--theta2", "2.0", "--p", "1", "--q", "3", "--bracket", "0.9:1.0", "--tol", "1e-7")
    rec = json.loads(out.splitlines()[-1])
    assert code == 0
    assert rec["edge"] == pytest.approx(2.0 - math.pi / 3, abs=1e-7)


def test_square_f(capsys, tmp_path):
    out = tmp_path / "f.json"
    code, stdout, _ = run(capsys, "square-f", "--phi1", "pi/3", "--phi2", "pi/3", "--out", str(out))
    rec = json.loads(stdout)
    assert code == 0
    assert rec["a"][0] == pytest.approx(0.3789373819630118)
    assert rec["slopes"] == pytest.approx([1, 1, 1])
    assert out.with_suffix(".png").exists()
    code, stdout, _ = run(capsys, "square-f", "--theta1", "atan:1/3", "--theta2", "atan:-2/3")
    assert code == 0 and json.loads(stdout)["branch"] == "low"


@pytest.mark.parametrize(
    "argv",
    [
        ["rho", "--domain", '{"kind": "blob"}', "--theta1", "0", "--theta2", "1"],
        ["rho", "--domain", '{"kind": "polygon", "vertices": [[0, 0], [0, 1], [1, 0]]}', "--theta1", "0", "--theta2", "1"],
        ["square-f", "--phi1", "0.5", "--phi2", "pi/4"],
        ["rho", "--domain", "/nonexistent/file.json", "--theta1", "0", "--theta2", "1"],
    ],
)
def test_errors_exit_nonzero(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code != 0 and err.startswith("chessbilliard")


def test_bad_flags_exit_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--grid", "0x3"])
    assert exc.value.code != 0


def test_verify_exit_status(capsys):
    code, out, _ = run(capsys, "verify", "--only", "2", "3")
    assert code == 0 and "2/2 checks passed" in out
    code, out, _ = run(capsys, "verify", "--only", "8")
    assert code == 1 and "[FAIL]" in out
