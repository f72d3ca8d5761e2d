from __future__ import annotations

import csv
import io
import json

import pytest

from diracmorse import bound
from diracmorse.cli import ConfigError, RunConfig, main
from diracmorse.model import ModelParams


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_example(capsys):
    code, out, _ = run(capsys, "spectrum")
    assert code == 0
    table = rows(out)
    assert len(table) == 8
    assert list(table[0]) == ["n", "branch", "epsilon", "alpha_n", "valid", "shooting_epsilon", "abs_delta"]
    assert (table[0]["n"], table[0]["branch"], float(table[0]["epsilon"])) == ("0", "+", 0.6)
    assert float(table[1]["epsilon"]) == -0.6
    for r in table:
        if r["valid"] == "true":
            assert float(r["abs_delta"]) <= 1e-6
        else:
            assert r["shooting_epsilon"] == ""


@pytest.mark.parametrize("flags, fragment", [
    (["--A", "0"], "A must be nonzero"),
    (["--omega", "0"], "omega must be > 0"),
    (["--xi", "-0.5"], "xi must be > 0"),
    (["--xi", "1.2"], "lambda_c * xi must be < 1"),
])
def test_invalid_model_exits_2(capsys, flags, fragment):
    code, out, err = run(capsys, "spectrum", *flags)
    assert code == 2 and out == ""
    assert fragment in err


def test_csv_uses_newlines_and_full_precision(capsys):
    _, out, _ = run(capsys, "spectrum")
    assert "\r" not in out
    eps1 = rows(out)[2]["epsilon"]
    # the printed text reproduces the double exactly
    ref = bound.energy(ModelParams(2.0, 0.5, 0.8, 1.0), 1, bound.PLUS)
    assert float(eps1) == ref and eps1 == format(ref, ".17g")


def test_output_is_deterministic(capsys):
    a = run(capsys, "wavefunction", "--energy", "1.25", "--n-terms", "20")[1]
    b = run(capsys, "wavefunction", "--energy", "1.25", "--n-terms", "20")[1]
    assert a == b


def test_json_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "spectrum", "--format", "json", "--A", "-2")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "results"}
    cfg = RunConfig.from_dict(doc["config"])
    assert cfg.to_dict() == doc["config"]
    assert cfg.model.A == -2.0
    # a saved document can be fed back as a config
    path = tmp_path / "run.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "spectrum", "--format", "json", "--config", str(path))
    assert code == 0 and json.loads(out2) == doc


def test_config_file_and_overrides(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"model": {"A": 2.0, "omega": 0.5, "xi": 0.8, "lambda_c": 1.0},
                                "energy": 1.5, "n_terms": 5}))
    code, out, _ = run(capsys, "coefficients", "--config", str(path), "--n-terms", "3")
    assert code == 0 and len(rows(out)) == 3
    path.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "spectrum", "--config", str(path))[0] == 2
    assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"nope": 1})
    with pytest.raises(ConfigError, match="A must be nonzero"):
        RunConfig.from_dict({"model": {"A": 0}})


def test_output_file(capsys, tmp_path):
    path = tmp_path / "spec.csv"
    code, out, _ = run(capsys, "spectrum", "--output", str(path))
    assert code == 0 and out == ""
    assert len(rows(path.read_text())) == 8


def test_bound_wavefunction(capsys):
    code, out, _ = run(capsys, "wavefunction", "--state", "0+")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["x", "z", "phi_upper", "theta_lower", "ode_residual"]
    assert len(table) == 100
    assert max(float(r["ode_residual"]) for r in table) <= 1e-6


@pytest.mark.parametrize("argv", [
    ["wavefunction", "--energy", "0.9"],
    ["wavefunction", "--energy", "0.5"],
    ["coefficients", "--energy", "-0.99"],
])
def test_bound_energy_as_scattering_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "bound-state regime; use spectrum" in err


@pytest.mark.parametrize("argv", [
    ["wavefunction", "--state", "0+", "--n-points", "0"],
    ["wavefunction", "--state", "3+"],
    ["wavefunction", "--state", "0+", "--energy", "1.5"],
    ["wavefunction"],
    ["wavefunction", "--state", "0+", "--z-min", "5", "--z-max", "2"],
])
def test_wavefunction_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def _max_residual(capsys, *extra):
    out = run(capsys, "wavefunction", "--energy", "1.25", "--z-min", "1", "--z-max", "10", *extra)[1]
    return max(float(r["ode_residual"]) for r in rows(out))


def test_scattering_residuals(capsys):
    # the plain partial sums get worse with more terms; their Riesz means get better
    assert _max_residual(capsys, "--n-terms", "64") > _max_residual(capsys, "--n-terms", "16")
    assert (_max_residual(capsys, "--n-terms", "64", "--cesaro", "2")
            < _max_residual(capsys, "--n-terms", "16", "--cesaro", "2"))


def test_coefficients(capsys):
    code, out, _ = run(capsys, "coefficients", "--energy", "1.25", "--n-terms", "4")
    assert code == 0
    table = rows(out)
    assert [r["n"] for r in table] == ["0", "1", "2", "3"]
    assert float(table[0]["f_n"]) == 1.0 and float(table[0]["S_n"]) == 1.0
    assert run(capsys, "coefficients")[0] == 2


def test_verify_default_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "[FAIL]" not in out and "checks passed" in out


def test_verify_fault_injection(capsys):
    code, out, _ = run(capsys, "verify", "--only", "tridiag", "--perturb-zeta", "0.1")
    assert code == 1
    assert "[FAIL] tridiag/" in out


def test_verify_only(capsys):
    code, out, _ = run(capsys, "verify", "--only", "cdh")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert lines and all("] cdh/" in ln for ln in lines)
    assert run(capsys, "verify", "--only", "nonsense")[0] == 2


def test_verify_json_keeps_stdout_clean(capsys):
    code, out, err = run(capsys, "verify", "--only", "laguerre", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all(r["suite"] == "laguerre" and r["passed"] for r in doc["results"])
    assert "checks passed" in err
