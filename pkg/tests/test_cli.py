from splitnet.csvlog import read_table

TINY_RBF = """
[run]
experiment = RBF_TOY
method = OPTIMAL_SPLIT
seed = 0
target_neurons = 2

[data]
n_points = 80

[optim]
max_iters = 200

[convergence]
check_every = 20
"""


def test_no_args_shows_help(app, runner):
    result = runner.invoke(app, [])
    assert "run" in result.output
    assert "verify" in result.output


def test_run_writes_outputs(app, runner, write_ini, tmp_path):
    path = write_ini(TINY_RBF)
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 0, result.output
    for name in ("run.csv", "splits.csv", "final_model.csv", "config.echo"):
        assert (tmp_path / name).is_file()
    assert read_table(tmp_path / "run.csv")


def test_seed_flag_overrides_config(app, runner, write_ini, tmp_path):
    path = write_ini(TINY_RBF)
    result = runner.invoke(app, ["run", "--config", str(path), "--seed", "7"])
    assert result.exit_code == 0, result.output
    assert "seed = 7" in (tmp_path / "config.echo").read_text(encoding="utf-8")


def test_unknown_key_exits_with_config_code(app, runner, write_ini):
    path = write_ini("[policy]\nepsilonn = 1\n")
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 2
    assert "policy.epsilonn" in result.output


def test_unknown_section_exits_with_config_code(app, runner, write_ini):
    path = write_ini("[polcy]\nepsilon = 1\n")
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 2
    assert "polcy" in result.output


def test_missing_config_file(app, runner, tmp_path):
    result = runner.invoke(app, ["run", "--config", str(tmp_path / "nope.ini")])
    assert result.exit_code == 2


def test_verify_only_writes_report(app, runner, tmp_path):
    result = runner.invoke(app, ["verify", "--only", "order_fit_selftest", "--only", "eigensolver"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "verify_report.txt").is_file()
    rows = read_table(tmp_path / "verify_report.csv")
    assert {row["property"] for row in rows} == {"order_fit_selftest", "eigensolver"}


def test_verify_unknown_property(app, runner):
    result = runner.invoke(app, ["verify", "--only", "no_such_property"])
    assert result.exit_code == 2
    assert "no_such_property" in result.output


def test_divergence_exits_with_numeric_code_and_keeps_logs(app, runner, write_ini, tmp_path):
    path = write_ini(TINY_RBF.replace("max_iters = 200", "max_iters = 200\nlearning_rate = inf"))
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 3
    rows = read_table(tmp_path / "run.csv")
    assert rows and rows[0]["event"] == "descent"
    assert (tmp_path / "config.echo").is_file()


def test_sweep_angle_writes_csv(app, runner, write_ini, tmp_path):
    path = write_ini(TINY_RBF + "\n[sweep]\nn_angles = 8\n")
    result = runner.invoke(app, ["sweep-angle", "--config", str(path)])
    assert result.exit_code == 0, result.output
    rows = read_table(tmp_path / "angle_sweep.csv")
    assert list(rows[0]) == ["angle", "loss_decrease", "predicted"]
    assert len(rows) == 8
    assert "ANGLE_SWEEP" in (tmp_path / "config.echo").read_text(encoding="utf-8")


def test_eigen_gain_writes_csv(app, runner, write_ini, tmp_path):
    path = write_ini(TINY_RBF)
    result = runner.invoke(app, ["eigen-gain", "--config", str(path), "--seed", "4"])
    assert result.exit_code == 0, result.output
    rows = read_table(tmp_path / "eigen_gain.csv")
    assert rows and all(r["seed"] == "4" for r in rows)
    lambdas = [float(r["lambda_min"]) for r in rows]
    assert lambdas == sorted(lambdas)
