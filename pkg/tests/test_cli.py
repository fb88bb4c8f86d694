import json
import math
import subprocess
import sys

import pytest

from slicedom.cli import (
    COMMANDS,
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_NUMERIC,
    EXIT_OK,
    ConfigError,
    JobConfig,
    build_parser,
    main,
    resolve_config,
)

SMALL_CX = ["--n-circle", "32", "--n-units", "64", "--openness-units", "4", "--openness-grid", "6"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_every_command_has_help():
    parser = build_parser()
    for name in COMMANDS:
        with pytest.raises(SystemExit) as e:
            parser.parse_args([name, "--help"])
        assert e.value.code == 0


def test_intertwine_pass(capsys):
    code, out, err = run(capsys, "verify-intertwine", "--n-max", "3", "--samples", "10")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"] and rep["max_residual"] <= 1e-12
    assert "verify-intertwine: PASS" in err


def test_perturbed_unit_reports_named_invariant(capsys):
    code, out, err = run(capsys, "verify-intertwine", "--n-max", "2", "--samples", "3", "--perturb", "0.1")
    assert code == EXIT_INVARIANT
    assert "[ImaginaryUnit.purity]" in err
    assert json.loads(out)["error"]["invariant"] == "ImaginaryUnit.purity"


def test_config_errors(capsys, tmp_path):
    assert run(capsys, "verify-intertwine", "--n-max", "13")[0] == EXIT_CONFIG
    assert run(capsys, "verify-conjugation", "--samples", "0")[0] == EXIT_CONFIG
    assert run(capsys, "verify-conjugation", "--tol", "-1")[0] == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "repr-eval", "--config", str(bad))[0] == EXIT_CONFIG
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"params": {"bogus": 1}}))
    assert run(capsys, "repr-eval", "--config", str(extra))[0] == EXIT_CONFIG
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"command": "extend"}))
    assert run(capsys, "repr-eval", "--config", str(other))[0] == EXIT_CONFIG
    assert run(capsys, "topology", "--example", "custom")[0] == EXIT_CONFIG
    assert run(capsys, "extend", "--point", "0.1", "-0.5")[0] == EXIT_CONFIG


def test_jobconfig_roundtrip():
    cfg = JobConfig("extend", seed=4, tol=1e-9, format="csv", params={"degree": 3})
    assert JobConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ConfigError):
        JobConfig.from_json({"command": "extend", "colour": "red"})
    with pytest.raises(ConfigError):
        JobConfig.from_json({"seed": 1})


def test_config_file_then_flags(tmp_path):
    f = tmp_path / "job.json"
    f.write_text(json.dumps({"seed": 7, "tol": 1e-6, "params": {"degree": 3, "k_samples": 5}}))
    args = build_parser().parse_args(["repr-eval", "--config", str(f), "--k-samples", "9"])
    cfg = resolve_config(args)
    assert cfg.seed == 7 and cfg.tol == 1e-6
    assert cfg.params["degree"] == 3 and cfg.params["k_samples"] == 9 and cfg.params["N"] == 2


def test_csv_is_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.csv"
        code = main(["verify-conjugation", "--n-max", "2", "--samples", "4", "--seed", "5", "--format", "csv", "--out", str(path)])
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    assert outs[0].splitlines()[0] == b"N,sample,residual,min_log10_det_margin"
    path = tmp_path / "r2.csv"
    main(["verify-conjugation", "--n-max", "2", "--samples", "4", "--seed", "6", "--format", "csv", "--out", str(path)])
    assert path.read_bytes() != outs[0]


def test_repr_eval_n1_classical_column(capsys):
    code, out, _ = run(capsys, "repr-eval", "--N", "1", "--k-samples", "20", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].endswith("abs_error,classical_diff")
    diffs = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
    assert len(diffs) == 22 and max(diffs) <= 1e-12


def test_repr_eval_reports_failing_level(capsys, tmp_path):
    f = tmp_path / "job.json"
    f.write_text(json.dumps({"params": {"unit_matrix": {"N": 1, "rows": [[[1, 0, 0]], [[1, 0, 0]]]}}}))
    code, out, err = run(capsys, "repr-eval", "--config", str(f))
    assert code == EXIT_INVARIANT
    assert json.loads(out)["error"]["level"] == 1 and "NotFullSliceRank" in err


def test_extend(capsys):
    code, out, _ = run(capsys, "extend", "--seed", "3")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["reproduce_I1_error"] == 0.0
    assert all(3.5 <= r <= 4.5 for r in rep["cr_ratios"])


@pytest.mark.parametrize("germ", ['{"kind": "polynomial", "degree": 5}', '{"kind": "log", "branch_point": -3.0}', '{"kind": "reciprocal", "pole": 2.0}'])
def test_continue_path(capsys, germ):
    code, out, _ = run(capsys, "continue-path", "--N", "3", "--germ", germ)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["abs_error"] <= 1e-10


def test_continue_path_unknown_germ(capsys):
    assert run(capsys, "continue-path", "--germ", '{"kind": "sine"}')[0] == EXIT_CONFIG


def test_counterexample_small(capsys):
    code, out, _ = run(capsys, "counterexample", *SMALL_CX)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["status"] == "obstruction certified"
    assert abs(rep["monodromy_abs"] - 2 * math.pi) <= 1e-4


def test_counterexample_shrunk_circle(capsys):
    code, out, err = run(capsys, "counterexample", *SMALL_CX, "--probe-radius", "5e-4")
    assert code == EXIT_INVARIANT
    assert json.loads(out)["status"] == "no obstruction" and "FAIL" in err


def test_topology_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "topology", "--example", "ellipse", "--n-units", "16", "--points-per-slice", "64", "--k-max", "8")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["slice_open"]["passed"] and all(e["escaped"] for e in rep["ball_escapes"])
    code, out, _ = run(capsys, "topology", "--example", "ball", "--n-units", "16", "--grid", "128")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["pieces_avoid_real"] and rep["real_trace"]["intervals"] == []
    spec = tmp_path / "set.json"
    spec.write_text(json.dumps({"set": "ball", "center": [0.5, 0.2, 0, 0], "radius": 1.0}))
    code, out, _ = run(capsys, "topology", "--example", "custom", "--file", str(spec), "--n-units", "8", "--completion-samples", "50")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["completion_idempotent"] and rep["real_trace_consistent"]
    missing = tmp_path / "missing.json"
    assert run(capsys, "topology", "--example", "custom", "--file", str(missing))[0] == EXIT_CONFIG


def test_numeric_failure_exit_code(capsys, tmp_path):
    f = tmp_path / "job.json"
    path = {"parts": [{"legs": [{"kind": "segment", "start": [1, 0], "end": [-1, 0]}]}]}
    f.write_text(json.dumps({"params": {"germ": {"kind": "reciprocal", "pole": 0.0}, "path": path, "units": [[1, 0, 0]]}}))
    code, out, err = run(capsys, "continue-path", "--config", str(f))
    assert code == EXIT_NUMERIC and "SingularityHit" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "slicedom", "verify-intertwine", "--n-max", "1", "--samples", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["passed"]
