import json
import math

import numpy as np
import pytest

from solvdiff import cli, schema
from solvdiff.errors import ParseError
from solvdiff.montecarlo import SimConfig
from solvdiff.processes import CIR, OU
from solvdiff.transform import build_transform


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


CIR_DOC = {"schema": 1, "type": "process", "kind": "CIR", "a": 1.0, "b": 1.0, "sigma": 1.0}
CFG_DOC = {"schema": 1, "type": "simconfig", "dt": 0.01, "n_paths": 500, "horizon": 0.5, "seed": 1}


# ------------------------------------------------------------------ schema

@pytest.mark.parametrize("obj", [
    CIR(0.75, 1.0, 1.0),
    OU(0.5, 2.0, 0.7),
    build_transform(CIR(0.75, 1.0, 1.0), 0.4, 1.0, 1.0, 0.0, 1.0),
    SimConfig(dt=0.01, n_paths=100, horizon=1.0, seed=4, boundary_policy="ReflectNever", noise_substeps=2),
    schema.ExpressionDiffusion("0", "x*(1-x)", 0.0, 1.0),
    schema.ExpressionDiffusion("-x", "1", -math.inf, math.inf),
    schema.SpecfunJob("kummer_m", (("a", 0.5), ("b", 1.5)), (0.0, 1.0, 2.5)),
])
def test_json_round_trip(obj, tmp_path):
    path = tmp_path / "obj.json"
    schema.dump(obj, path)
    back = schema.load(path)
    assert schema.same(obj, back)
    assert schema.dumps(back) == path.read_text()


def test_unknown_field_rejected():
    with pytest.raises(ParseError, match="unknown field"):
        schema.loads(json.dumps({**CIR_DOC, "colour": "red"}))


def test_bad_json_reports_position():
    with pytest.raises(ParseError, match="line 3, column 10"):
        schema.loads('{"schema": 1,\n "type": "process",\n "kind": CIR}')


@pytest.mark.parametrize("version", [None, 0, 2, "1"])
def test_schema_version_checked(version):
    doc = {k: v for k, v in CIR_DOC.items() if k != "schema"}
    if version is not None:
        doc["schema"] = version
    with pytest.raises(ParseError, match="schema version"):
        schema.loads(json.dumps(doc))


def test_specfun_grid_form():
    job = schema.loads(json.dumps({"schema": 1, "type": "specfun", "function": "gauss_2f1",
                                   "params": {"a": 1, "b": 1, "c": 2}, "z": {"lo": -0.5, "hi": 0.5, "n": 5}}))
    assert job.z == tuple(np.linspace(-0.5, 0.5, 5))
    # 2F1(1, 1; 2; z) = -log(1 - z) / z
    z = np.array(job.z[:2] + job.z[3:])
    np.testing.assert_allclose(job.evaluate()[[0, 1, 3, 4]], -np.log1p(-z) / z, rtol=1e-14)


@pytest.mark.parametrize("text", ["__import__('os')", "x.real", "open('f')", "[x]", "'a'", "y + 1", "lambda: 1"])
def test_expression_whitelist(text):
    with pytest.raises(ParseError):
        schema.compile_expression(text)


def test_expression_values():
    f = schema.compile_expression("sqrt(2*x) * exp(-x) + pi")
    x = np.array([0.5, 2.0])
    np.testing.assert_allclose(f(x), np.sqrt(2 * x) * np.exp(-x) + np.pi)
    assert schema.compile_expression("3")(x).tolist() == [3.0, 3.0]


# ------------------------------------------------------------------ exit codes

def test_usage_error_exits_1(capsys):
    assert cli.main(["transform", "bogus"]) == 1
    assert cli.main([]) == 1
    assert "solvdiff" in capsys.readouterr().err


def test_domain_error_exits_1(tmp_path, capsys):
    p, c = write(tmp_path, "p.json", CIR_DOC), write(tmp_path, "c.json", CFG_DOC)
    assert cli.main(["simulate", "--in", p, "--config", c, "--x0", "-1", "--out", str(tmp_path / "o.csv")]) == 1
    assert "OutOfDomain" in capsys.readouterr().err


def test_parse_and_io_errors_exit_1(tmp_path):
    assert cli.main(["classify", "--in", str(tmp_path / "missing.json")]) == 1
    assert cli.main(["classify", "--in", write(tmp_path, "b.json", {**CIR_DOC, "extra": 1})]) == 1


def test_non_convergence_exits_2(tmp_path, capsys):
    d = write(tmp_path, "d.json", {"schema": 1, "type": "diffusion", "drift": "x**2", "vol": "0",
                                   "lo": "-inf", "hi": "inf"})
    c = write(tmp_path, "c.json", {**CFG_DOC, "dt": 0.001})
    assert cli.main(["simulate", "--in", d, "--config", c, "--x0", "5", "--out", str(tmp_path / "o.csv")]) == 2
    assert "did not converge" in capsys.readouterr().err


# ------------------------------------------------------------------ outputs

def read_csv(path):
    raw = open(path, "rb").read()
    assert b"\r" not in raw
    lines = raw.decode().rstrip("\n").split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_csv_format(tmp_path):
    out = tmp_path / "s.csv"
    job = write(tmp_path, "j.json", {"schema": 1, "type": "specfun", "function": "kummer_m",
                                     "params": {"a": 1.0, "b": 1.0}, "z": [0.1, 1.0]})
    assert cli.main(["specfun", "--in", job, "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["z", "kummer_m"]
    # M(a, a, z) = e^z, printed so that it round-trips exactly
    assert float(rows[1][1]) == pytest.approx(math.e, rel=1e-15)
    assert rows[0][0] == "0.10000000000000001"


def test_negative_zero_is_printed_as_zero(tmp_path):
    out = tmp_path / "e.csv"
    assert cli.main(["process", "spectrum", "--in", write(tmp_path, "p.json", CIR_DOC), "--n", "2",
                     "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows[0][1] == "0"


def test_transform_density_matrix(tmp_path):
    base = write(tmp_path, "b.json", CIR_DOC)
    t = tmp_path / "t.json"
    assert cli.main(["transform", "build", "--base", base, "--rho", "0.4", "--c", "1", "1", "0", "1",
                     "--out", str(t)]) == 0
    out = tmp_path / "d.csv"
    assert cli.main(["transform", "density", "--in", str(t), "--t", "0.5", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[0] == "y0\\y1" and len(header) == 65 and len(rows) == 64
    vals = np.array([[float(v) for v in r[1:]] for r in rows])
    assert np.all(np.isfinite(vals)) and np.all(vals >= 0)


def test_transform_domain_rows(tmp_path):
    base = write(tmp_path, "b.json", CIR_DOC)
    t = tmp_path / "t.json"
    cli.main(["transform", "build", "--base", base, "--rho", "0.4", "--c", "1", "1", "0", "1", "--out", str(t)])
    out = tmp_path / "dom.csv"
    assert cli.main(["transform", "domain", "--in", str(t), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["y_endpoint", "value", "class", "source"]
    assert [r[0] for r in rows] == ["hi", "lo"]


def test_classify_cir(tmp_path, capsys):
    p = write(tmp_path, "p.json", {**CIR_DOC, "a": 0.75})
    assert cli.main(["classify", "--in", p, "--method", "table"]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().split("\n")[1:]]
    assert [r[2] for r in rows] == ["entrance", "natural"]
    assert {r[3] for r in rows} == {"table"}


def quadratic(tmp_path, name, scale):
    return write(tmp_path, name, {"schema": 1, "type": "diffusion", "drift": "0",
                                  "vol": f"{scale}*x*(1-x)", "lo": 0, "hi": 1})


def test_invariant_compare(tmp_path, capsys):
    a = quadratic(tmp_path, "a.json", 1)
    assert cli.main(["invariant", "compare", "--a", a, "--b", a]) == 0
    assert capsys.readouterr().out.startswith("equivalent, rho=")
    bm = write(tmp_path, "bm.json", {"schema": 1, "type": "diffusion", "drift": "0", "vol": "1",
                                     "lo": "-inf", "hi": "inf"})
    ou = write(tmp_path, "ou.json", {"schema": 1, "type": "diffusion", "drift": "-x", "vol": "1",
                                     "lo": "-inf", "hi": "inf"})
    assert cli.main(["invariant", "compare", "--a", bm, "--b", ou]) == 0
    assert capsys.readouterr().out.startswith("not equivalent")


def test_simulate_outputs(tmp_path):
    p, c = write(tmp_path, "p.json", CIR_DOC), write(tmp_path, "c.json", CFG_DOC)
    out, summ = tmp_path / "o.csv", tmp_path / "s.csv"
    args = ["simulate", "--in", p, "--config", c, "--x0", "1.0", "--out", str(out), "--summary", str(summ)]
    assert cli.main(args) == 0
    header, rows = read_csv(out)
    assert header == ["terminal_value"] and len(rows) <= 500
    first = out.read_bytes()
    assert cli.main(args) == 0
    assert out.read_bytes() == first
    header, rows = read_csv(summ)
    assert [r[0] for r in rows] == ["alive", "lo", "hi"]
    assert sum(float(r[1]) for r in rows) == pytest.approx(1.0)


def test_accept_reports_one_line(capsys):
    assert cli.main(["accept", "6"]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert len(out) == 1 and out[0].startswith("[PASS] criterion 6")
