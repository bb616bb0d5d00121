#test_splitting.py
import math

import numpy as np
import pytest

from splitnet.exceptions import SplitNetError, StaleCandidateError
from splitnet.loss import loss, param_grad
from splitnet.schemas import SplitPolicy
from splitnet.splitting import (
    apply_split, predicted_change, select_splits, split_along, split_many, split_round, splitting_candidates,
    splitting_matrix,
)
from splitnet.verify.oracles import measure_split_gain

TWIN_LAMBDA = -0.5 + 0.375 * math.exp(-0.125)


def test_candidates_match_per_neuron_matrices(rbf_problem):
    net, data, kind = rbf_problem
    for c in splitting_candidates(net, data, kind):
        S = splitting_matrix(net, data, kind, c.neuron_index)
        assert np.array_equal(c.matrix.data, S.data)
        assert c.splitting_index == pytest.approx(np.linalg.eigvalsh(S.data)[0], abs=1e-10)
        assert np.linalg.norm(c.splitting_gradient) == pytest.approx(1.0, abs=1e-12)


def test_splitting_matrix_index_out_of_range(rbf_problem):
    net, data, kind = rbf_problem
    with pytest.raises(SplitNetError):
        splitting_matrix(net, data, kind, net.n)


def test_twin_point_is_stationary_with_negative_index(twin_point):
    net, data, kind = twin_point
    assert np.array_equal(param_grad(net, data, kind), np.zeros((1, 2)))
    candidate = splitting_candidates(net, data, kind)[0]
    assert candidate.splitting_index == pytest.approx(TWIN_LAMBDA, rel=1e-12)
    assert np.allclose(candidate.splitting_gradient, [1.0, 0.0])


def test_twin_point_gain_matches_prediction(twin_point):
    net, data, kind = twin_point
    candidate = splitting_candidates(net, data, kind)[0]
    predicted = -predicted_change(candidate, 1e-2)
    assert measure_split_gain(net, data, kind, candidate, 1e-2) == pytest.approx(predicted, rel=1e-2)


def test_positive_index_split_does_not_help(repelled_particle):
    net, data, kind = repelled_particle
    candidate = splitting_candidates(net, data, kind)[0]
    assert candidate.splitting_index > 0
    assert measure_split_gain(net, data, kind, candidate, 1e-2) <= 0


def test_select_splits_threshold_and_order(rbf_problem):
    net, data, kind = rbf_problem
    candidates = splitting_candidates(net, data, kind)
    everything = select_splits(candidates, SplitPolicy(max_splits=10, threshold=0.0))
    assert all(c.splitting_index <= 0 for c in everything)
    keys = [(c.splitting_index, c.neuron_index) for c in everything]
    assert keys == sorted(keys)
    assert len(select_splits(candidates, SplitPolicy(max_splits=1, threshold=0.0))) <= 1
    assert select_splits(candidates, SplitPolicy(max_splits=0)) == []


def test_split_along_layout(rbf_problem):
    net, _, _ = rbf_problem
    out = split_along(net, 1, [0.0, 3.0, 4.0], 0.1)
    assert out.n == net.n + 1
    assert np.allclose(out.neurons[1], net.neurons[1] + 0.1 * np.array([0.0, 0.6, 0.8]))
    assert np.allclose(out.neurons[2], net.neurons[1] - 0.1 * np.array([0.0, 0.6, 0.8]))
    assert out.weights[1] == out.weights[2] == 0.5 * net.weights[1]
    assert np.array_equal(out.neurons[3], net.neurons[2])
    assert out.total_weight() == pytest.approx(net.total_weight(), rel=1e-15)


def test_split_along_rejects_zero_direction(rbf_problem):
    net, _, _ = rbf_problem
    with pytest.raises(SplitNetError):
        split_along(net, 0, [0.0, 0.0, 0.0], 0.1)


def test_split_with_zero_epsilon_keeps_loss(rbf_problem):
    net, data, kind = rbf_problem
    twin = split_along(net, 0, [1.0, 0.0, 0.0], 0.0)
    assert loss(twin, data, kind) == pytest.approx(loss(net, data, kind), abs=1e-12)


def test_split_many_equals_sequential(rbf_problem):
    net, _, _ = rbf_problem
    directions = {0: np.array([1.0, 0.0, 0.0]), 2: np.array([0.0, 1.0, 0.0])}
    together = split_many(net, directions, 0.05)
    sequential = split_along(split_along(net, 2, directions[2], 0.05), 0, directions[0], 0.05)
    assert np.array_equal(together.neurons, sequential.neurons)
    assert together.n == net.n + 2


def test_apply_split_rejects_stale_candidate(rbf_problem):
    net, data, kind = rbf_problem
    candidate = splitting_candidates(net, data, kind)[0]
    moved = net.replace(neurons=net.neurons + 1e-3)
    with pytest.raises(StaleCandidateError):
        apply_split(moved, candidate, 1e-2)


def test_apply_split_event(twin_point):
    net, data, kind = twin_point
    candidate = splitting_candidates(net, data, kind)[0]
    out, event = apply_split(net, candidate, 1e-2, round=3)
    assert event.round == 3 and event.parent_index == 0 and event.children == (0, 1)
    assert event.lambda_min == candidate.splitting_index
    assert np.allclose(out.neurons, [[1e-2, 0.0], [-1e-2, 0.0]])


def test_split_round_shifts_pending_indices(rbf_problem):
    net, data, kind = rbf_problem
    policy = SplitPolicy(max_splits=net.n, threshold=0.0)
    selected = select_splits(splitting_candidates(net, data, kind), policy)
    out, events = split_round(net, data, kind, policy)
    assert out.n == net.n + len(selected)
    assert [e.parent_index for e in events] == [
        c.neuron_index + sum(1 for p in selected[:k] if p.neuron_index < c.neuron_index)
        for k, c in enumerate(selected)
    ]
    assert out.total_weight() == pytest.approx(net.total_weight(), rel=1e-15)


def test_split_round_without_eligible_neurons(repelled_particle):
    net, data, kind = repelled_particle
    out, events = split_round(net, data, kind, SplitPolicy(threshold=-10.0))
    assert events == [] and out is net
