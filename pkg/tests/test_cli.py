import csv
import io
import json
import subprocess
import sys

import pytest

from zmeasures.cli import format_complex, main, parse_complex


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("text,value", [
    ("0.3", 0.3), ("0.4+0.7i", 0.4 + 0.7j), ("0.4-0.7i", 0.4 - 0.7j), ("-1e-3+2e-2i", -1e-3 + 2e-2j),
    ("1.5e+2-3i", 150 - 3j), ("2i", 2j), ("-i", -1j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_format_roundtrip():
    for v in (0.1 + 0.2j, -3.0, 1e-300 - 7.5j):
        assert parse_complex(format_complex(v)) == v


def test_kernel_one_row(capsys):
    code, out, _ = run(["kernel", "--family", "gamma_first", "--z", "0.3", "--zp", "0.6", "--x", "0.5", "--y", "1.5"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["family", "x", "y", "value"]
    assert len(rows) == 2 and float(rows[1][3]) == 0.06297179023282029


def test_correlation_side_by_side(capsys):
    code, out, _ = run(["correlation", "--family", "zxi", "--z", "0.3", "--zp", "0.6", "--xi", "0.35",
                        "--points", "0.5,1.5", "--embedding", "underline", "--rtol", "1e-6"], capsys)
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert code == 0
    assert abs(float(row["oracle"]) - float(row["determinant"])) == float(row["abs_diff"])


def test_identity_default_parameters(capsys):
    code, out, _ = run(["identity", "--suite", "form-relation", "--window", "30"], capsys)
    assert code == 0 and out.strip().splitlines()[-1].endswith("true")


def test_conjugate_is_filled_in(capsys):
    code, out, _ = run(["weight", "--family", "zxi", "--z", "0.4+0.7i", "--xi", "0.35", "--state", "2,1",
                        "--format", "json"], capsys)
    body = json.loads(out)
    assert code == 0
    assert body["schema_version"] == 1 and body["inputs"]["zp"] == "0.4-0.7i"
    assert body["rows"][0]["value"] == pytest.approx(0.00487364253666178, rel=1e-12)


def test_exit_code_invalid_parameters(capsys):
    code, _, err = run(["kernel", "--family", "gamma_first", "--z", "0.2", "--zp", "-0.1", "--x", "0.5", "--y", "0.5"], capsys)
    assert code == 2 and "error" in err
    code, _, _ = run(["weight", "--family", "zxi", "--z", "0.3", "--xi", "0.5"], capsys)
    assert code == 2


def test_exit_code_budget(capsys):
    code, _, _ = run(["correlation", "--family", "zxi", "--z", "0.4+0.7i", "--xi", "0.9", "--points", "0.5",
                      "--cutoff", "10", "--tol", "1e-9"], capsys)
    assert code == 3


def test_exit_code_failed_verdict(capsys):
    # the xi ladder run backwards increases
    code, _, _ = run(["scan", "--source", "hypergeometric", "--coupling", "xi_ladder", "--ladder", "0.999,0.99",
                      "--probes", "0.5:1.5", "--z", "0.3", "--zp", "0.6"], capsys)
    assert code == 1


def test_sample_requires_seed():
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--z", "0.3", "--zp", "0.6"])
    assert exc.value.code == 2


def test_sample_is_byte_identical(tmp_path):
    args = [sys.executable, "-m", "zmeasures", "sample", "--z", "0.3", "--zp", "0.6", "--seed", "5", "--count", "25"]
    a = subprocess.run(args, capture_output=True, check=True).stdout
    b = subprocess.run(args, capture_output=True, check=True).stdout
    assert a == b and a.count(b"\n") == 26


def test_csv_values_parse_back_exactly(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, _, _ = run(["kernel", "--family", "hypergeom_second", "--z", "0.4+0.7i", "--xi", "0.5",
                      "--x=-2.5,0.5,3.5", "--y=-0.5,1.5", "--out", str(out)], capsys)
    assert code == 0
    from zmeasures.kernels import HypergeometricKernel
    from zmeasures.measures import ZXiParams
    K = HypergeometricKernel(ZXiParams(0.4 + 0.7j, 0.4 - 0.7j, 0.5))
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6
    for r in rows:
        assert float(r["value"]) == K.second(float(r["x"]), float(r["y"]))


def test_json_mirrors_csv(capsys):
    argv = ["kernel", "--family", "psi", "--z", "0.3", "--x", "0.5,1.5", "--y", "2.5"]
    _, out_csv, _ = run(argv, capsys)
    _, out_json, _ = run(argv + ["--format", "json"], capsys)
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    body = json.loads(out_json)
    assert [float(r["value"]) for r in rows] == [r["value"] for r in body["rows"]]


def test_ortho_and_identity_suites(capsys):
    code, out, _ = run(["ortho", "--family", "zw", "--z", "0.4+0.7i", "--w", "1.2+0.5i", "--N", "2"], capsys)
    assert code == 0 and "false" not in out
    code, out, _ = run(["identity", "--suite", "fourier"], capsys)
    assert code == 0
