import json

import pytest

from ellipend.cli import main


def run_cli(*argv):
    return main(list(argv))


DIMLESS = ["--mu", "1", "--beta", "0.5", "--eps", "0.04", "--omega", "0"]


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "traj.csv"
    code = run_cli("simulate", *DIMLESS, "--tau-max", "20", "--samples", "50",
                   "--tol", "1e-10", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    assert any("command=simulate" in c for c in comments)
    assert any("tol=1e-10" in c for c in comments)
    header_idx = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header_idx] == "tau,theta,theta_dot"
    assert len(lines) - header_idx - 1 == 50


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", *DIMLESS, "--tau-max", "20", "--samples", "40"]
    assert run_cli(*args, "--out", str(a)) == 0
    assert run_cli(*args, "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_plot(tmp_path):
    out = tmp_path / "traj.csv"
    code = run_cli("simulate", *DIMLESS, "--tau-max", "20", "--samples", "40",
                   "--out", str(out), "--plot")
    assert code == 0
    png = tmp_path / "traj.png"
    assert png.exists() and png.stat().st_size > 1000


def test_physical_params_source(tmp_path):
    out = tmp_path / "traj.csv"
    code = run_cli("simulate", "--m", "1", "--l", "1", "--c", "0.5", "--g", "0.25",
                   "--X", "0.8", "--Y", "1.2", "--Omega", "1",
                   "--tau-max", "10", "--samples", "20", "--out", str(out))
    assert code == 0
    assert "omega=0.5 beta=0.5" in out.read_text()  # nondimensionalized values


def test_params_file_source(tmp_path):
    pf = tmp_path / "params.txt"
    pf.write_text("eps=0.04\nmu=1\nomega=0\nbeta=0.5\n")
    out = tmp_path / "traj.csv"
    assert run_cli("simulate", "--params", str(pf), "--tau-max", "10",
                   "--samples", "20", "--out", str(out)) == 0


def test_params_file_unknown_key_is_usage_error(tmp_path, capsys):
    pf = tmp_path / "params.txt"
    pf.write_text("eps=0.04\nmu=1\nomega=0\nbeta=0.5\nbogus=3\n")
    out = tmp_path / "traj.csv"
    code = run_cli("simulate", "--params", str(pf), "--tau-max", "10", "--out", str(out))
    assert code == 2


def test_conflicting_sources_rejected(tmp_path):
    pf = tmp_path / "params.txt"
    pf.write_text("eps=0.04\nmu=1\nomega=0\nbeta=0.5\n")
    out = tmp_path / "traj.csv"
    code = run_cli("simulate", "--params", str(pf), "--mu", "1", "--beta", "0.5",
                   "--eps", "0.04", "--omega", "0", "--tau-max", "10", "--out", str(out))
    assert code == 2


def test_exact_json(tmp_path):
    out = tmp_path / "exact.json"
    assert run_cli("exact", *DIMLESS, "--out", str(out)) == 0
    data = json.loads(out.read_text())
    assert data["existence_window"] is True
    assert len(data["branches"]) == 2
    assert data["branches"][0]["stable"] is True


def test_exact_domain_error_exit_code(tmp_path, capsys):
    out = tmp_path / "exact.json"
    code = run_cli("exact", "--mu", "1", "--beta", "1.2", "--eps", "0", "--omega", "0",
                   "--out", str(out))
    assert code == 1


def test_error_json_flag(tmp_path, capsys):
    out = tmp_path / "exact.json"
    code = run_cli("--error-json", "exact", "--mu", "1", "--beta", "1.2",
                   "--eps", "0", "--omega", "0", "--out", str(out))
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["error"] == "NoRotationError"


def test_multiscale_json_and_csv(tmp_path):
    out = tmp_path / "sol.json"
    assert run_cli("multiscale", *DIMLESS, "--order", "2", "--out", str(out)) == 0
    data = json.loads(out.read_text())
    assert data["solution"]["method"] == "multiscale2"
    assert data["solution"]["series2"] is not None

    csv_out = tmp_path / "sol.csv"
    assert run_cli("multiscale", *DIMLESS, "--order", "1", "--format", "csv",
                   "--samples", "64", "--out", str(csv_out)) == 0
    lines = [l for l in csv_out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "tau,theta,theta_dot"
    assert len(lines) == 65


def test_average_report(tmp_path):
    out = tmp_path / "avg.json"
    assert run_cli("average", "--mu", "1", "--beta", "0.01", "--eps", "0.04",
                   "--omega", "0", "--out", str(out)) == 0
    data = json.loads(out.read_text())
    assert data["order"] == 2
    assert data["stable"] is True
    assert data["Q"] == pytest.approx(1.857175709279484, rel=1e-9)
    assert set(data) >= {"Q", "Zeta", "residual", "stable", "advisory_Q", "advisory_Zeta"}


def test_compare_reports(tmp_path):
    out = tmp_path / "cmp.json"
    assert run_cli("compare", *DIMLESS, "--methods", "multiscale1,multiscale2",
                   "--out", str(out)) == 0
    data = json.loads(out.read_text())
    methods = [r["method"] for r in data["reports"]]
    assert methods == ["multiscale1", "multiscale2"]
    assert data["reports"][1]["max_abs_err"] < data["reports"][0]["max_abs_err"]


def test_compare_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["compare", *DIMLESS, "--methods", "multiscale2"]
    assert run_cli(*args, "--out", str(a)) == 0
    assert run_cli(*args, "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_without_beta_template(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli("sweep", "--mu", "1", "--eps", "0.04", "--omega", "0",
                   "--beta-grid", "0.3:0.9:3", "--methods", "multiscale2",
                   "--out", str(out))
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0].startswith("beta,eps,mu,omega,method")
    assert len(rows) == 4


def test_sweep_plot_and_log_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli("sweep", "--mu", "1", "--eps", "0.04", "--omega", "0",
                   "--beta-grid", "0.3:0.9:3", "--log-grid",
                   "--methods", "multiscale2", "--out", str(out), "--plot")
    assert code == 0
    assert (tmp_path / "sweep.png").exists()


def test_bad_grid_is_usage_error(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli("sweep", "--mu", "1", "--eps", "0.04", "--omega", "0",
                   "--beta-grid", "oops", "--methods", "multiscale2", "--out", str(out))
    assert code == 2


def test_unknown_method_is_usage_error(tmp_path):
    out = tmp_path / "cmp.json"
    code = run_cli("compare", *DIMLESS, "--methods", "bogus", "--out", str(out))
    assert code == 2


def test_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc_info:
        run_cli("simulate", "--bogus", "1")
    assert exc_info.value.code == 2


def test_help_lists_flags_with_defaults(capsys):
    with pytest.raises(SystemExit) as exc_info:
        run_cli("simulate", "--help")
    assert exc_info.value.code == 0
    # argparse wraps help text, so check tokens rather than exact phrases
    text = " ".join(capsys.readouterr().out.split())
    for needle in ("--tol", "default: 1e-10", "--samples", "default: 1024",
                   "--theta-dot0", "rad", "dimensionless"):
        assert needle in text
