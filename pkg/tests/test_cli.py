import hashlib
import json
import subprocess
import sys

import numpy as np

from conftest import match_error
from corechase.cli import fmt_float, main, parse_inline


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_lines(out):
    return np.array([complex(*map(float, line.split(","))) for line in out.split()])


def test_roots_inline(capsys):
    code, out, _ = run(capsys, "roots", "--inline", "-1,0,1")
    assert code == 0
    assert match_error(parse_lines(out), [1, -1]) <= 1e-14


def test_roots_qz_matches_qr_from_file(capsys, tmp_path, rng):
    a = rng.standard_normal(11) + 1j * rng.standard_normal(11)
    a /= a[-1]
    f = tmp_path / "poly.json"
    f.write_text(json.dumps([[z.real, z.imag] for z in a]))
    _, qr, _ = run(capsys, "roots", "--method", "qr", str(f))
    code, qz, _ = run(capsys, "roots", "--method", "qz", "--scale", "norm", str(f))
    assert code == 0
    assert match_error(parse_lines(qr), parse_lines(qz)) <= 1e-9


def test_roots_json_and_descending(capsys):
    code, out, _ = run(capsys, "roots", "--inline", "1,-5,6", "--order", "descending", "--json",
                       "--method", "dense")
    roots = [complex(*z) for z in json.loads(out)]
    assert code == 0 and match_error(roots, [2, 3]) <= 1e-13


def test_roots_diagnostics(capsys):
    code, out, _ = run(capsys, "roots", "--inline", "1,0,0,1", "--json", "--diagnostics")
    doc = json.loads(out)
    assert code == 0 and doc["diagnostics"]["sweeps"] > 0 and len(doc["roots"]) == 3


def test_zero_roots_are_printed(capsys):
    code, out, _ = run(capsys, "roots", "--inline", "0,1,0")
    assert code == 0 and out.split() == ["0,0"]


def test_malformed_json_names_token(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("[[1, 0], [oops, 2]]")
    code, _, err = run(capsys, "roots", str(f))
    assert code == 1 and "oops" in err


def test_bad_pairs_and_inputs(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("[[1, 0], [2]]")
    assert run(capsys, "roots", str(f))[0] == 1
    assert run(capsys, "roots", "--inline", "1,x")[0] == 1
    assert run(capsys, "roots", "--inline", "0,0")[0] == 1
    assert run(capsys, "roots", str(tmp_path / "nope.json"))[0] == 1
    assert run(capsys, "roots")[0] == 1
    assert run(capsys, "roots", "--method", "magic", "--inline", "1,1")[0] == 1


def test_no_convergence_exit_code(capsys, monkeypatch):
    import corechase.cli as cli
    # a zero budget is rejected as usage; a solver that gives up is a numerical failure
    assert run(capsys, "roots", "--inline", "1,2,3,4,5,6", "--max-iter", "0")[0] == 1
    real = cli.solve_qr
    monkeypatch.setattr(cli, "solve_qr", lambda p, **kw: real(p, max_iter=0))
    code, _, err = run(capsys, "roots", "--inline", "1,2,3,4,5,6")
    assert code == 2 and "converge" in err


def test_experiment_rows_and_hash(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, out, _ = run(capsys, "experiment", "--samples", "2", "--degrees", "10", "--out", str(a))
    assert code == 0 and "companionQR" in out
    assert len(a.read_text().splitlines()) == 25
    run(capsys, "experiment", "--samples", "2", "--degrees", "10", "--out", str(b))
    assert hashlib.sha256(a.read_bytes()).digest() == hashlib.sha256(b.read_bytes()).digest()


def test_experiment_flag_errors(capsys):
    assert run(capsys, "experiment", "--methods", "lapack")[0] == 1
    assert run(capsys, "experiment", "--rhos", "0..13")[0] == 1
    code, out, _ = run(capsys, "experiment", "--methods", "", "--out", "/dev/null")
    assert code == 0 and out.startswith("0 runs")


def test_experiment_rho_range(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "experiment", "--rhos", "2..4", "--samples", "1", "--degrees", "5",
                     "--methods", "denseQR,companionQZ_unscaled", "--out", str(out))
    assert code == 0 and len(out.read_text().splitlines()) == 7


def test_bench(capsys, tmp_path):
    assert run(capsys, "bench", "--repeats", "0")[0] == 1
    code, out, err = run(capsys, "bench", "--degrees", "8,16", "--repeats", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "method,degree,seconds" and len(lines) == 7
    assert "t(16)/t(8)" in err and "QZ/QR" in err
    f = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "--degrees", "8", "--repeats", "1", "--no-dense", "--out", str(f))
    assert len(f.read_text().splitlines()) == 3 and "QZ/QR" in out


def test_formatting():
    assert fmt_float(1.0) == "1" and fmt_float(0.1) == "0.1" and fmt_float(-2.5e-20) == "-2.5e-20"
    assert parse_inline(" 1, 2+3j ,-4 ").tolist() == [1, 2 + 3j, -4]


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "corechase.cli", "roots", "--inline", "-4,0,1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert match_error(parse_lines(res.stdout), [2, -2]) <= 1e-14
