import random
import subprocess
import sys

import pytest

from sqzdecomp.cli import main
from sqzdecomp.fields import gf
from sqzdecomp.matrices import Matrix, format_matrix, parse_matrix

OBSTRUCTED = "0 0 1;1 0 1;0 1 1"  # companion of x^3 - x^2 - x - 1 over GF(3)
OBSTRUCTED_6 = "n 6 field 3\n0 0 1 0 0 0\n1 0 1 0 0 0\n0 1 1 0 0 0\n0 0 0 0 0 1\n0 0 0 1 0 1\n0 0 0 0 1 1\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    lines = out.splitlines()
    assert lines[0] == "sqz-decomp report v1"
    return dict(line.split("=", 1) for line in lines[1:])


def test_decompose_obstructed_exit2(capsys):
    code, out, _ = run(capsys, "decompose", "--field", "3", "--matrix", OBSTRUCTED)
    assert code == 2
    assert "outcome: impossible" in out and "evidence: exhaustive" in out


def test_decompose_random_gf5(tmp_path, capsys):
    rng = random.Random(1)
    A = Matrix(gf(5), [[rng.randrange(5) for _ in range(7)] for _ in range(7)])
    path = tmp_path / "a.txt"
    path.write_text(format_matrix(A))
    code, out, _ = run(capsys, "decompose", "--input", str(path), "--format", "kv")
    d = kv(out)
    assert code == 0 and d["outcome"] == "decomposed" and d["checks"] == "pass"


def test_decompose_zero_1x1(capsys):
    code, out, _ = run(capsys, "decompose", "--field", "5", "--matrix", "0")
    assert code == 0
    assert "D =\nn 1 field 5\n0\nM =\nn 1 field 5\n0\n" in out
    assert "checks = pass" in out


def test_decompose_mixed_unknown(capsys):
    A = "0 0 1 0 0 0 0;1 0 1 0 0 0 0;0 1 1 0 0 0 0;0 0 0 0 0 0 0;0 0 0 1 0 0 1;0 0 0 0 1 0 1;0 0 0 0 0 1 1"
    code, out, _ = run(capsys, "decompose", "--field", "3", "--matrix", A, "--budget", "500", "--format", "kv")
    d = kv(out)
    assert code == 3 and d["outcome"] == "unknown" and "reason" in d


def test_decompose_input_errors(tmp_path, capsys):
    code, _, err = run(capsys, "decompose", "--matrix", "0")
    assert code == 1 and "needs --field" in err
    path = tmp_path / "bad.txt"
    path.write_text("n 2 field 3\n0 1\n")
    code, _, err = run(capsys, "decompose", "--input", str(path))
    assert code == 1 and err.startswith("error:")
    code, _, err = run(capsys, "decompose", "--input", str(tmp_path / "missing.txt"))
    assert code == 1
    code, _, err = run(capsys, "decompose", "--field", "5", "--matrix", "0 1;1 0", "--budget", "0")
    assert code == 1
    code, _, err = run(capsys, "decompose", "--field", "3", "--input", str(path.with_name("x")), "--matrix", "0 1")
    assert code == 1


def test_field_mismatch_is_input_error(tmp_path, capsys):
    path = tmp_path / "a.txt"
    path.write_text("n 1 field 3\n1\n")
    code, _, err = run(capsys, "rcf", "--input", str(path), "--field", "5")
    assert code == 1 and "does not match" in err


def test_usage_error_exit1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nosuch"])
    assert e.value.code == 1
    capsys.readouterr()


def test_rcf(capsys):
    code, out, _ = run(capsys, "rcf", "--field", "3", "--matrix", "1 0;0 1", "--format", "kv")
    d = kv(out)
    assert code == 0 and d["factors"] == "x+2, x+2" and d["checks"] == "pass"
    code, out, _ = run(capsys, "rcf", "--field", "3", "--matrix", OBSTRUCTED, "--format", "kv")
    assert kv(out)["factors"] == "x^3+2x^2+2x+2"


def test_rcf_repeated_block(tmp_path, capsys):
    path = tmp_path / "a.txt"
    path.write_text(OBSTRUCTED_6)
    code, out, _ = run(capsys, "rcf", "--input", str(path), "--format", "kv")
    assert kv(out)["factors"] == "x^3+2x^2+2x+2, x^3+2x^2+2x+2"


def test_verify(tmp_path, capsys):
    (tmp_path / "a").write_text("n 2 field 3\n0 0\n1 0\n")
    (tmp_path / "d").write_text("n 2 field 3\n0 1\n1 0\n")
    (tmp_path / "m").write_text("n 2 field 3\n0 2\n0 0\n")
    code, out, _ = run(
        capsys, "verify", "--input", str(tmp_path / "a"), "--d", str(tmp_path / "d"), "--m", str(tmp_path / "m"), "--format", "kv"
    )
    assert code == 0 and kv(out)["checks"] == "pass"
    (tmp_path / "m").write_text("n 2 field 3\n1 0\n0 1\n")
    code, out, _ = run(capsys, "verify", "--input", str(tmp_path / "a"), "--d", str(tmp_path / "d"), "--m", str(tmp_path / "m"))
    assert code == 4 and "check.square_zero: fail" in out
    code, _, _ = run(capsys, "verify", "--input", str(tmp_path / "a"))
    assert code == 1


def test_census(capsys):
    code, out, _ = run(capsys, "census", "--field", "3", "--order", "2", "--format", "kv")
    d = kv(out)
    assert code == 0 and d["decomposable"] == "81" and d["non_decomposable"] == "0"
    code, _, err = run(capsys, "census", "--field", "5", "--order", "5")
    assert code == 1 and "infeasible" in err
    code, _, _ = run(capsys, "census", "--field", "3")
    assert code == 1


def test_obstruction_check(tmp_path, capsys):
    code, out, _ = run(capsys, "obstruction-check", "--field", "3", "--matrix", OBSTRUCTED, "--format", "kv")
    assert code == 0 and kv(out)["evidence"] == "exhaustive"
    path = tmp_path / "a.txt"
    path.write_text(OBSTRUCTED_6)
    code, out, _ = run(capsys, "obstruction-check", "--input", str(path), "--budget", "3000", "--seed", "5", "--format", "kv")
    assert code == 0 and kv(out)["evidence"] == "randomized seed=5 candidates=3000 hits=0"
    code, _, err = run(capsys, "obstruction-check", "--field", "3", "--matrix", "1 0 0;0 1 0;0 0 1")
    assert code == 1 and "not all one obstructed cubic" in err


def test_stdin_input(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("n 2 field 7\n1 2\n3 4\n"))
    code, out, _ = run(capsys, "decompose", "--input", "-", "--format", "kv")
    assert code == 0 and kv(out)["field"] == "7"


def test_deterministic_output(tmp_path, capsys):
    path = tmp_path / "a.txt"
    path.write_text(OBSTRUCTED_6)
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "decompose", "--field", "3^2", "--matrix", "1 2 3 4;5 6 7 8;0 1 2 3;4 5 6 7")
        outs.append(out)
        _, out, _ = run(capsys, "obstruction-check", "--input", str(path), "--budget", "2000")
        outs.append(out)
    assert outs[0] == outs[2] and outs[1] == outs[3]
    assert "outcome: decomposed" in outs[0]


def test_module_entry_point(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("n 2 field 5\n1 1\n0 1\n")
    res = subprocess.run([sys.executable, "-m", "sqzdecomp", "decompose", "--input", str(path), "--format", "kv"], capture_output=True, text=True)
    assert res.returncode == 0
    D = res.stdout.split("D=")[1].splitlines()[0]
    assert parse_matrix("n 2 field 5\n" + D.replace(",", " ").replace(";", "\n")).n == 2
