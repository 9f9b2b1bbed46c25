import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffspaces import BandParams, SpecError
from diffspaces.cli import (SCHEMA, RunConfig, main, parse_band, parse_lambda, parse_matrix, parse_sequence,
                            parse_spec, selfcheck)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_examples():
    lam = parse_lambda("arithmetic:1,1")
    assert np.allclose(lam.prefix(4), [1, 2, 3, 4])
    assert parse_sequence("expr:ln(k+3)").at(0) == pytest.approx(np.log(3))
    A = parse_spec("band:1,-2,1", "matrix")
    assert np.array_equal(A.block(4, 4)[3], [0, 1, -2, 1])
    assert parse_band("band:1,-2,1") == BandParams(1, -2, 1)


def test_parse_matrix_kinds():
    p, lam = BandParams(1, -1, 0), parse_lambda("arithmetic:1,1")
    for spec in ("zero", "identity", "band-inverse", "lambda-mean", "lambda-mean-inverse", "what", "cesaro",
                 "summation", "diff1", "diffm:2", "euler:0.5", "band2:1,2", "riesz:k+1", "a_r_u:0.5;k+1",
                 "factorable:k+1;1", "diagonal:2^(-n)", "rows:1/(k+1)"):
        assert parse_matrix(spec, p, lam).block(5, 5).shape == (5, 5), spec
    assert np.allclose(parse_matrix("lambda-mean", p, lam).block(3, 3), parse_matrix("cesaro").block(3, 3))


def test_parse_matrix_file(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("1,2\n3,4\n")
    assert np.array_equal(parse_matrix(f"file:{f}").block(2, 2), [[1, 2], [3, 4]])
    with pytest.raises(SpecError):
        parse_matrix(f"file:{tmp_path / 'missing.csv'}")


@pytest.mark.parametrize("text,role,pos", [
    ("expr:1/(k+", "sequence", 7), ("expr:k + q", "sequence", 9), ("arithmetic:1,x", "lambda", 13),
    ("band:1,2", "band", 5), ("values:3,2,1", "lambda", 0), ("nope", "matrix", 0), ("what", "matrix", 0),
])
def test_parse_errors_have_positions(text, role, pos):
    with pytest.raises(SpecError) as info:
        parse_spec(text, role)
    assert info.value.position == pos


def test_zero_r_rejected():
    with pytest.raises(SpecError):
        parse_band("0,1,1")


def test_config_round_trip(tmp_path):
    cfg = RunConfig(band="2,0.5,0.25", lam="squares", tolerances={"eps_tail": 1e-4}, schedule=[32, 64],
                    format="csv", seed=5)
    assert RunConfig.from_json(cfg.to_json()) == cfg
    assert RunConfig.from_json(cfg.to_json()).to_json() == cfg.to_json()
    with pytest.raises(ValueError):
        RunConfig.from_json('{"bogus": 1}')
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    code, out, _ = run("selfcheck", "--config", str(path), "--emit-config")
    assert code == 0 and json.loads(out) == json.loads(cfg.to_json())


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.lists(st.integers(2, 4096), min_size=1, max_size=5),
       st.sampled_from(["json", "csv", "table"]), st.integers(0, 10**6),
       st.dictionaries(st.sampled_from(["eps_exact", "eps_tail", "growth_ratio"]), st.floats(1.01, 5.0)))
def test_config_round_trip_property(s, t, schedule, fmt, seed, tols):
    cfg = RunConfig(band=f"1,{s!r},{t!r}", lam="arithmetic:1,1", tolerances=tols, schedule=schedule,
                    format=fmt, seed=seed)
    assert RunConfig.from_json(cfg.to_json()).to_json() == cfg.to_json()


def test_report_schema_and_transform():
    code, out, _ = run("transform", "--seq", "zero", "--N", "5")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == SCHEMA and rep["command"] == "transform"
    assert rep["results"]["values"] == [0.0] * 5
    code, out, _ = run("transform", "--seq", "zero", "--N", "3", "--format", "csv")
    assert out == "n,value\n0,0.0\n1,0.0\n2,0.0\n"


def test_invert_recovers_witness():
    code, out, _ = run("invert", "--seq", "const:1", "--band", "1,-2,1", "--N", "4", "--format", "csv")
    assert code == 0
    assert [float(line.split(",")[1]) for line in out.splitlines()[1:]] == [1.0, 3.0, 6.0, 10.0]


def test_classify_thm7_lp():
    code, out, _ = run("classify", "--seq", "thm7", "--space", "domain:lp:2", "--band", "0.5,0.25,0.25",
                       "--N", "4096")
    assert code == 0
    assert json.loads(out)["results"]["verdict"] == "NonMember"


def test_classify_inconclusive_warns():
    code, out, err = run("classify", "--seq", "expr:1/sqrt(k+1)", "--space", "c0", "--N", "4096")
    assert code == 0
    assert json.loads(out)["warnings"]
    assert "warning" in err


def test_classify_theorem_and_precondition():
    code, out, _ = run("classify", "--theorem", "4", "--N", "2000")
    assert code == 0 and json.loads(out)["results"]["confirmed"]
    code, _, err = run("classify", "--theorem", "5", "--band", "1,1,1", "--N", "2000")
    assert code == 3 and "precondition" in err


def test_usage_errors():
    assert run("transform", "--seq", "expr:1/(k+")[0] == 2
    assert run("bogus")[0] == 2
    assert run("classify", "--seq", "e")[0] == 2
    assert run("transform", "--seq", "e", "--lambda", "values:1,1,2")[0] == 2


def test_condition_subset_and_missing_arguments():
    code, _, err = run("matclass", "--A", "zero", "--conditions", "(44)")
    assert code == 0
    code, _, _ = run("basis", "--N", "4")
    assert code == 2


def test_basis_dual_matclass_witness():
    code, out, _ = run("basis", "--k", "2", "--band", "1,0,0", "--N", "5", "--format", "csv")
    assert out.splitlines()[3:5] == ["2,3.0", "3,-3.0"]
    code, out, _ = run("basis", "--seq", "expr:2^(-k)", "--N", "6")
    assert json.loads(out)["results"]["error_table"][-1]["domain_norm_error"] == 0.0
    code, out, _ = run("dual", "--dual", "beta", "--space", "c0", "--a", "expr:2^(-k)", "--band", "1,0,0")
    assert json.loads(out)["results"]["verdict"] == "Member"
    code, out, _ = run("matclass", "--thm", "17", "--A", "diagonal:2^(-n)", "--band", "1,0,0")
    assert json.loads(out)["results"]["verdict"] == "Member"
    code, out, _ = run("matclass", "--A", "lambda-mean", "--conditions", "L1", "--band", "1,0,0")
    assert json.loads(out)["results"]["verdict"] == "NonMember"
    code, out, _ = run("witness", "--name", "thm5", "--N", "2", "--format", "csv")
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(np.log(3))
    code, out, _ = run("dual", "--dual", "gamma", "--space", "linf", "--a", "e", "--format", "table")
    assert "verdict" in out


def test_selfcheck_default_passes():
    res = selfcheck(0)
    assert res["ok"], res
    code, out, _ = run("selfcheck")
    assert code == 0 and json.loads(out)["results"]["ok"]


def test_selfcheck_deterministic():
    assert run("selfcheck", "--seed", "3")[1] == run("selfcheck", "--seed", "3")[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "diffspaces.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
