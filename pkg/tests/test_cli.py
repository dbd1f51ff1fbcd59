import io
import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from permperron import matrixio
from permperron.cli import main

from .conftest import EXAMPLE_A, EXAMPLE_WITNESS


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.txt"
    matrixio.dump(EXAMPLE_A, path)
    return str(path)


def test_maximize_text(example_file):
    code, text = run("maximize", "-i", example_file)
    assert code == 0
    lines = text.splitlines()
    assert float(lines[0].split()[1]) == pytest.approx(20.9863, abs=1e-3)
    assert lines[2] == "certificate: true"
    assert lines[3] == "witness:"
    assert_array_equal(np.loadtxt(io.StringIO("\n".join(lines[4:]))), EXAMPLE_WITNESS)


def test_maximize_json(example_file):
    code, text = run("maximize", "-i", example_file, "--format", "json", "--init", "identity")
    obj = json.loads(text)
    assert code == 0
    assert obj["loops"] == 2
    assert obj["certificate"] is True
    assert obj["trace"][0]["applied_permutation"] == [1, 5, 2, 3, 4]
    assert obj["settings"]["tol"] == 1e-12
    assert_array_equal(obj["witness"], EXAMPLE_WITNESS)


def test_json_byte_identical(example_file):
    a = run("minimize", "-i", example_file, "--format", "json")[1]
    b = run("minimize", "-i", example_file, "--format", "json")[1]
    assert a == b


def test_witness_round_trip(example_file, tmp_path):
    for ext in (".txt", ".json"):
        out = str(tmp_path / f"w{ext}")
        assert run("minimize", "-i", example_file, "-o", out)[0] == 0
        code, text = run("certify", "-i", out, "--against", example_file, "--direction", "min")
        assert code == 0
        assert "certificate (min): true" in text


def test_trace_file(example_file, tmp_path):
    trace = tmp_path / "trace.json"
    run("maximize", "-i", example_file, "--trace", str(trace), "--init", "identity")
    assert len(json.loads(trace.read_text())) == 2


def test_certify_non_member(example_file, tmp_path, capsys):
    bad = EXAMPLE_WITNESS.copy()
    bad[2, 0] += 1
    path = tmp_path / "bad.txt"
    matrixio.dump(bad, path)
    code, text = run("certify", "-i", str(path), "--against", example_file)
    assert code == 3
    assert "in_omega: false" in text
    assert "row 3" in capsys.readouterr().err


def test_certify_not_optimal(example_file):
    code, text = run("certify", "-i", example_file, "--against", example_file)
    assert code == 3
    assert "in_omega: true" in text


def test_certify_dimension_mismatch(example_file, tmp_path):
    other = tmp_path / "small.txt"
    matrixio.dump(np.ones((2, 2)), other)
    assert run("certify", "-i", str(other), "--against", example_file)[0] == 1


def test_oracle(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("2\n1 2\n3 4\n")
    code, text = run("oracle", "-i", str(path))
    assert code == 0
    lines = dict(line.split(": ") for line in text.splitlines() if ": " in line)
    assert lines["count"] == "4"
    assert float(lines["mean"]) == 5.0
    assert float(lines["max"]) == pytest.approx((5 + 33 ** 0.5) / 2, abs=1e-12)


def test_oracle_too_large(example_file):
    assert run("oracle", "-i", example_file)[0] == 1


def test_bound(example_file):
    code, text = run("bound", "-i", example_file, "--format", "json")
    obj = json.loads(text)
    assert code == 0 and obj["method"] == "algorithm"
    assert obj["min_rho"] < obj["mean_row_sum"] < obj["max_rho"]


def test_equality(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("2\n1 2\n2 1\n")
    assert run("equality", "-i", str(path))[1].strip() == "flat_eigenvector"


@pytest.mark.parametrize("content, argv", [
    ("2\n1 2\n3\n", ["maximize"]),
    ("2\n1 2\n3 -1\n", ["bound"]),
    ("3\n1 0 0\n0 1 0\n0 0 1\n", ["maximize"]),
])
def test_input_errors(tmp_path, capsys, content, argv):
    path = tmp_path / "m.txt"
    path.write_text(content)
    assert run(*argv, "-i", str(path))[0] == 1
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file(tmp_path):
    assert run("maximize", "-i", str(tmp_path / "none.txt"))[0] == 1


def test_usage_error_is_input_error(capsys):
    assert run("maximize")[0] == 1
    assert run("bogus")[0] == 1


def test_loop_limit_is_solver_failure(example_file):
    assert run("maximize", "-i", example_file, "--init", "identity", "--max-loops", "1")[0] == 2


def test_experiment_csv(tmp_path, capsys):
    out = tmp_path / "runs.csv"
    code, _ = run("experiment", "--dims", "4,6", "--instances", "3", "--seed", "1", "-o", str(out))
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("dim,instance,direction,loops")
    assert len(rows) == 1 + 2 * 3 * 2
    assert "global max loops" in capsys.readouterr().err


def test_experiment_bad_dims():
    assert run("experiment", "--dims", "a,b")[0] == 1


def test_module_entry_point(example_file):
    proc = subprocess.run([sys.executable, "-m", "permperron", "maximize", "-i", example_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("rho: 20.98")
