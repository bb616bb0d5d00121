#test_experiments.py
import math

import numpy as np
import pytest

from splitnet.csvlog import read_table
from splitnet.exceptions import SweepRefusedError
from splitnet.experiments import (
    angle_sweep, build_problem, eigen_vs_gain, grow_network, run, run_angle_sweep, run_eigen_gain,
    synth_gmm_reference, synth_rbf_dataset, synth_softplus_dataset,
)
from splitnet.loss import loss, mmd_brute_force
from splitnet.models import LossTag, Method, NeuronTag
from splitnet.neurons import forward_batch
from splitnet.schemas import RunConfig
from splitnet.verify.properties import tiny_config


def test_rbf_dataset_is_deterministic_and_noiseless():
    data, truth = synth_rbf_dataset(3)
    again, _ = synth_rbf_dataset(3)
    assert data.size == 1000 and truth.n == 15
    assert np.array_equal(data.inputs, again.inputs) and np.array_equal(data.targets, again.targets)
    assert np.array_equal(data.targets, forward_batch(truth, data.inputs))
    assert data.inputs.min() >= -5.0 and data.inputs.max() <= 5.0


def test_softplus_dataset():
    data, kind = synth_softplus_dataset(0, beta=5.0, n_points=200)
    assert kind.tag == NeuronTag.SOFTPLUS_UNIT and kind.beta == 5.0
    assert data.size == 200


def test_gmm_reference_moments():
    sample = synth_gmm_reference(0, 20000)
    assert sample.shape == (20000, 1)
    # media de la mezcla: 0.2·(−2) + 0.3·1 + 0.5·3 = 1.4
    assert sample.mean() == pytest.approx(1.4, abs=0.05)


def test_build_problem_kinds():
    mmd = build_problem(RunConfig.model_validate({"run": {"experiment": "MMD_COMPRESS"}, "data": {"n_points": 100}}))
    assert mmd.loss_kind.tag == LossTag.MMD and mmd.neuron_kind.bandwidth > 0
    fixed = build_problem(RunConfig.model_validate({"run": {"experiment": "MMD_COMPRESS"},
                                                    "model": {"bandwidth": 0.5}, "data": {"n_points": 100}}))
    assert fixed.neuron_kind.bandwidth == 0.5
    softplus = build_problem(RunConfig.model_validate({"model": {"kind": "SOFTPLUS_UNIT"}, "data": {"n_points": 50}}))
    assert softplus.neuron_kind.tag == NeuronTag.SOFTPLUS_UNIT


@pytest.mark.parametrize("method", [m for m in Method if m != Method.OPTIMAL_SPLIT])
def test_baseline_methods_reach_target(method):
    config = tiny_config(method=method.value)
    net, rounds = grow_network(config, build_problem(config))
    assert net.n == 3
    assert rounds == (1 if method == Method.SCRATCH else 3)


def _coincident_particles(initial: int, target: int, max_splits: int) -> RunConfig:
    """Partículas que arrancan en un mismo punto: su matriz de división es definida negativa"""
    config = tiny_config("MMD_COMPRESS")
    return config.model_copy(update={
        "run": config.run.model_copy(update={"initial_neurons": initial, "target_neurons": target}),
        "policy": config.policy.model_copy(update={"max_splits": max_splits}),
    })


def test_optimal_split_reaches_target(tmp_path):
    config = _coincident_particles(initial=2, target=4, max_splits=2)
    summary = run(config, tmp_path)
    assert summary.neuron_count == 4 and summary.rounds == 2
    splits = read_table(tmp_path / "splits.csv")
    assert [int(s["round"]) for s in splits] == [0, 0]
    assert all(float(s["lambda_min"]) < 0 for s in splits)


def test_optimal_split_never_overshoots():
    config = _coincident_particles(initial=2, target=3, max_splits=5)
    net, rounds = grow_network(config, build_problem(config))
    assert net.n == 3
    assert rounds == 2


def test_optimal_split_rbf_stays_within_target():
    config = tiny_config()
    net, rounds = grow_network(config, build_problem(config))
    assert 1 <= net.n <= 3
    assert rounds == net.n


def test_mmd_weights_stay_normalized():
    config = tiny_config("MMD_COMPRESS")
    net, _ = grow_network(config, build_problem(config))
    assert net.total_weight() == pytest.approx(1.0, abs=1e-15)


def test_run_writes_files(tmp_path):
    config = tiny_config()
    summary = run(config, tmp_path)
    for name in ("run.csv", "splits.csv", "final_model.csv", "config.echo"):
        assert (tmp_path / name).is_file()
    rows = read_table(tmp_path / "run.csv")
    assert rows[-1]["event"] == "round_end"
    assert float(rows[-1]["loss"]) == pytest.approx(summary.final_loss)
    splits = read_table(tmp_path / "splits.csv")
    assert len(splits) == summary.neuron_count - 1
    assert all(float(s["lambda_min"]) < 0 for s in splits)
    keys = [(int(r["round"]), int(r["iter"])) for r in rows]
    assert keys == sorted(keys)


def test_run_is_bit_reproducible(tmp_path):
    config = tiny_config("MMD_COMPRESS")
    run(config, tmp_path / "a")
    run(config, tmp_path / "b")
    for name in ("run.csv", "splits.csv", "final_model.csv", "config.echo"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_mmd_final_loss_matches_double_sum(tmp_path):
    config = tiny_config("MMD_COMPRESS")
    summary = run(config, tmp_path)
    reference = build_problem(config).loss_kind.reference
    assert summary.final_loss == pytest.approx(mmd_brute_force(summary.network, reference), abs=1e-10)


def test_angle_sweep_peaks_along_minimum_eigenvector(twin_point):
    net, data, kind = twin_point
    rows = angle_sweep(net, data, kind, 0, 1e-2, 8)
    gains = [r[1] for r in rows]
    assert [r[0] for r in rows] == pytest.approx([2 * math.pi * k / 8 for k in range(8)])
    assert int(np.argmax(gains)) in (0, 4)
    assert gains[0] == pytest.approx(rows[0][2], rel=1e-2)
    assert gains[1] == pytest.approx(gains[7], rel=1e-9)


def test_angle_sweep_refused_for_positive_index(repelled_particle):
    net, data, kind = repelled_particle
    with pytest.raises(SweepRefusedError):
        angle_sweep(net, data, kind, 0, 1e-2)


def test_eigen_vs_gain_rows(rbf_problem):
    net, data, kind = rbf_problem
    rows = eigen_vs_gain(net, data, kind, 1e-2)
    assert len(rows) == net.n
    assert [r[1] for r in rows] == sorted(r[1] for r in rows)
    assert sorted(r[0] for r in rows) == list(range(net.n))


def test_sweep_outputs(tmp_path):
    config = RunConfig.model_validate({
        "run": {"experiment": "EIGEN_VS_GAIN", "target_neurons": 2, "seed": 1},
        "data": {"n_points": 80},
        "optim": {"max_iters": 200},
    })
    path = run_eigen_gain(config, tmp_path)
    rows = read_table(path)
    assert list(rows[0]) == ["seed", "neuron", "lambda_min", "gain"]
    assert all(r["seed"] == "1" for r in rows)


@pytest.mark.slow
def test_angle_sweep_csv(tmp_path):
    config = RunConfig.model_validate({"run": {"experiment": "ANGLE_SWEEP", "target_neurons": 4}})
    path = run_angle_sweep(config, tmp_path)
    rows = read_table(path)
    assert len(rows) == 72


@pytest.mark.slow
def test_rbf_toy_loss_decreases(tmp_path):
    summary = run(RunConfig(), tmp_path)
    rows = read_table(tmp_path / "run.csv")
    ends = [float(r["loss"]) for r in rows if r["event"] == "round_end"]
    assert summary.neuron_count == 8
    assert ends[-1] < ends[0]


def test_mmd_loss_decreases_across_rounds(tmp_path):
    config = _coincident_particles(initial=1, target=3, max_splits=1)
    config = config.model_copy(update={"optim": config.optim.model_copy(update={"max_iters": 2000})})
    run(config, tmp_path)
    rows = read_table(tmp_path / "run.csv")
    ends = [float(r["loss"]) for r in rows if r["event"] == "round_end"]
    assert len(ends) >= 2
    assert np.all(np.diff(np.log(ends)) < 0)


def test_round_callback_sees_every_round_end(tmp_path):
    config = _coincident_particles(initial=2, target=4, max_splits=1)
    seen = []
    summary = run(config, tmp_path, on_round=lambda r, net: seen.append((r, net.n)))
    rows = read_table(tmp_path / "run.csv")
    ends = [(int(r["round"]), int(r["neuron_count"])) for r in rows if r["event"] == "round_end"]
    assert seen == ends
    assert seen[-1] == (summary.rounds - 1, summary.neuron_count)


def test_gradient_boost_rounds_log_boost_rows(tmp_path):
    config = tiny_config(method="GRADIENT_BOOST")
    run(config, tmp_path)
    rows = read_table(tmp_path / "run.csv")
    boosts = [r for r in rows if r["event"] == "boost"]
    assert [int(r["neuron_count"]) for r in boosts] == [2, 3]
    # solo la ronda 0 tiene descenso conjunto
    assert {int(r["round"]) for r in rows if r["event"] == "descent"} == {0}
    keys = [(int(r["round"]), int(r["iter"])) for r in rows]
    assert keys == sorted(keys)
