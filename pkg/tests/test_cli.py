import json
import math

import numpy as np
import pytest

from psihilfer.cli import (EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION,
                           load_config, main)
from psihilfer.errors import ValidationError

BASE_CONFIG = {
    "psi": {"kind": "identity", "domain": [0.0, 2.0]},
    "eta": 0.5,
    "nu": 0.5,
    "a": 0.0,
    "xi": 1.0,
    "y_a": 1.0,
    "rhs": "-1*y",
    "k_box": 1.0,
    "n": 512,
}


def _write_config(path, **overrides):
    cfg = dict(BASE_CONFIG)
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return str(path)


def test_load_minimal_config(tmp_path):
    cfg = load_config(_write_config(tmp_path / "c.json"))
    assert cfg.params.zeta == 0.75
    assert cfg.n == 512
    assert cfg.tol == 1e-10 and cfg.max_iter == 200


def test_load_rejects_bad_eta(tmp_path):
    with pytest.raises(ValidationError) as exc_info:
        load_config(_write_config(tmp_path / "c.json", eta=1.5))
    assert any("eta must lie in (0,1)" in v for v in exc_info.value.violations)


def test_load_rejects_small_mu(tmp_path):
    with pytest.raises(ValidationError) as exc_info:
        load_config(_write_config(tmp_path / "c.json", mu=0.2))
    assert any("mu must exceed 1-eta = 0.5" in v for v in exc_info.value.violations)


def test_load_collects_all_violations(tmp_path):
    with pytest.raises(ValidationError) as exc_info:
        load_config(_write_config(tmp_path / "c.json", eta=2.0, xi=-1.0,
                                  rhs="1 +", n=4))
    joined = "\n".join(exc_info.value.violations)
    assert "eta" in joined and "xi" in joined and "rhs" in joined and "n" in joined
    assert len(exc_info.value.violations) >= 4


def test_load_reports_eta_and_nu_together(tmp_path):
    with pytest.raises(ValidationError) as exc_info:
        load_config(_write_config(tmp_path / "c.json", eta=1.5, nu=2.0))
    joined = "\n".join(exc_info.value.violations)
    assert "eta must lie in (0,1)" in joined
    assert "nu must lie in [0,1]" in joined


def test_load_rejects_unknown_key(tmp_path):
    with pytest.raises(ValidationError) as exc_info:
        load_config(_write_config(tmp_path / "c.json", typo_key=1))
    assert any("typo_key" in v for v in exc_info.value.violations)


def test_solve_writes_csv_and_report(tmp_path):
    out = tmp_path / "sol.csv"
    cfg = _write_config(tmp_path / "c.json", output_path=str(out),
                        horizon=1.0, n=256)
    assert main(["solve", cfg]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "t,w,y"
    assert len(lines) == 258
    # zeta < 1: the y field at t = a stays empty
    first = lines[1].split(",")
    assert first[2] == ""
    report = json.loads((tmp_path / "sol.csv.report.json").read_text())
    assert report["converged"] is True
    assert report["iterations"] >= 1
    assert set(report) >= {"chi", "iterations", "deltas", "apriori_bounds",
                           "residual", "M_used", "L_used"}


def test_solve_determinism_across_runs_and_threads(tmp_path):
    outputs, reports = [], []
    for run, threads in ((0, "1"), (1, "1"), (2, "8")):
        out = tmp_path / f"sol{run}.csv"
        cfg = _write_config(tmp_path / f"c{run}.json", output_path=str(out),
                            horizon=1.0, n=256)
        assert main(["--threads", threads, "solve", cfg]) == EXIT_OK
        outputs.append(out.read_bytes())
        reports.append((tmp_path / f"sol{run}.csv.report.json").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    assert reports[0] == reports[1] == reports[2]


def test_linear_constant_and_cross_validation(tmp_path):
    out_s = tmp_path / "picard.csv"
    out_l = tmp_path / "linear.csv"
    cfg_s = _write_config(tmp_path / "cs.json", eta=0.6, nu=0.4,
                          output_path=str(out_s), horizon=1.0, n=512,
                          **{"lambda": -1.0})
    cfg_l = _write_config(tmp_path / "cl.json", eta=0.6, nu=0.4,
                          output_path=str(out_l), n=512, **{"lambda": -1.0})
    assert main(["solve", cfg_s]) == EXIT_OK
    assert main(["linear", cfg_l, "--mode", "constant"]) == EXIT_OK

    def w_column(path):
        rows = path.read_text().splitlines()[1:]
        return np.array([float(r.split(",")[1]) for r in rows])

    gap = np.max(np.abs(w_column(out_s) - w_column(out_l)))
    assert gap <= 5e-3


def test_linear_variable_mode(tmp_path):
    out = tmp_path / "var.csv"
    cfg = _write_config(tmp_path / "c.json", eta=0.6, nu=0.4, mu=1.2,
                        output_path=str(out), n=128, **{"lambda": -1.0})
    assert main(["linear", cfg, "--mode", "variable"]) == EXIT_OK
    assert out.read_text().splitlines()[0] == "t,w,y"


def test_ml_subcommand_prints_e(capsys):
    assert main(["ml", "--family", "two-param", "--eta", "1", "--nu", "1",
                 "--z", "1"]) == EXIT_OK
    out = capsys.readouterr().out.strip()
    assert abs(float(out) - math.e) < 1e-12


def test_ml_kilbas_saigo_family(capsys):
    assert main(["ml", "--family", "kilbas-saigo", "--eta", "0.5", "--m", "1",
                 "--l", "0", "--z", "0.5"]) == EXIT_OK
    val = float(capsys.readouterr().out.strip())
    assert val > 1.0


def test_bounds_subcommand_chi(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json")
    assert main(["bounds", cfg, "--norm-f", "1.0"]) == EXIT_OK
    out = capsys.readouterr().out
    values = dict(line.split(" = ") for line in out.splitlines() if " = " in line)
    assert abs(float(values["chi"]) - 0.5471099038066192) < 1e-6
    assert float(values["zeta"]) == 0.75
    apriori = [float(v) for k, v in values.items() if k.startswith("apriori")]
    assert all(b > a for a, b in zip(apriori[1:], apriori))


def test_parse_check_pretty_prints(capsys):
    assert main(["parse-check", "sin(t)*y + t^2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "((sin(t) * y) + (t ^ 2.0))" in out
    assert "call sin" in out and "op +" in out


def test_parse_check_syntax_error_exit_code(capsys):
    assert main(["parse-check", "1 + * 2"]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["category"] == "validation"


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json", eta=1.5)
    assert main(["solve", cfg]) == EXIT_VALIDATION
    payload = json.loads(capsys.readouterr().err)
    assert payload["category"] == "validation"
    assert any("eta" in v for v in payload["violations"])


def test_missing_config_exit_code(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.json")]) == EXIT_IO
    payload = json.loads(capsys.readouterr().err)
    assert payload["category"] == "io"


def test_nonconverged_solve_exit_code(tmp_path, capsys):
    out = tmp_path / "sol.csv"
    cfg = _write_config(tmp_path / "c.json", output_path=str(out),
                        horizon=1.0, n=256, max_iter=2)
    assert main(["solve", cfg]) == EXIT_NUMERICAL
    # outputs are still written: the last iterate is useful
    assert out.exists()
    payload = json.loads(capsys.readouterr().err)
    assert payload["category"] == "numerical"


def test_frint_subcommand(tmp_path):
    src = tmp_path / "h.csv"
    ts = np.linspace(0.0, 1.0, 200)
    src.write_text("t,h\n" + "\n".join(f"{t},{t**1.5}" for t in ts) + "\n")
    out = tmp_path / "out.csv"
    assert main(["frint", "--input", str(src), "--output", str(out),
                 "--eta", "0.5", "--n", "256"]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "t,frint"
    t_last, v_last = map(float, rows[-1].split(","))
    assert t_last == 1.0
    # I^{0.5} t^{1.5} = Gamma(2.5)/Gamma(3) t^2
    expected = math.gamma(2.5) / math.gamma(3.0)
    assert abs(v_last - expected) < 1e-3


def test_frint_power_requires_rho(tmp_path, capsys):
    src = tmp_path / "h.csv"
    src.write_text("0.0,0.0\n0.5,0.25\n1.0,1.0\n")
    rc = main(["frint", "--input", str(src), "--output",
               str(tmp_path / "o.csv"), "--eta", "0.5", "--psi", "power"])
    assert rc == EXIT_VALIDATION


def test_ml_nonconvergence_exit_code(capsys):
    rc = main(["ml", "--family", "two-param", "--eta", "0.5", "--nu", "1",
               "--z", "30", "--max-terms", "5"])
    assert rc == EXIT_NUMERICAL


def test_ml_overflow_exit_code(capsys):
    rc = main(["ml", "--family", "two-param", "--eta", "0.2", "--nu", "1",
               "--z", "1e9"])
    assert rc == EXIT_NUMERICAL
    payload = json.loads(capsys.readouterr().err)
    assert payload["category"] == "numerical"
