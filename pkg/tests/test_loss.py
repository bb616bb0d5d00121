#test_loss.py
import numpy as np
import pytest

from splitnet.exceptions import SplitNetError
from splitnet.loss import (
    grad_norm, hessian_T, loss, median_bandwidth, mmd_brute_force, outer_atoms, outer_derivs, param_grad,
    unweighted_gradients,
)
from splitnet.models import Dataset, LossKind, NetworkState, NeuronKind, NeuronTag
from splitnet.neurons import forward
from splitnet.schemas import FDSpec
from splitnet.splitting import assembled_hessian
from splitnet.verify.oracles import fd_grad, fd_hessian, relative_error


def _flat(net, data, kind):
    return lambda flat: loss(net.replace(neurons=flat.reshape(net.neurons.shape)), data, kind)


def test_exact_fit_has_zero_loss(single_bump):
    truth, data, kind = single_bump
    assert loss(truth, data, kind) == 0.0


def test_squared_error_needs_targets(rbf_problem):
    net, data, kind = rbf_problem
    with pytest.raises(SplitNetError):
        loss(net, Dataset(inputs=data.inputs), kind)


def test_mmd_needs_particles(rbf_problem):
    net, data, _ = rbf_problem
    with pytest.raises(SplitNetError):
        loss(net, data, LossKind.mmd([[0.0]]))


def test_mmd_closed_form_matches_double_sum():
    kind = NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=0.7, input_dim=1)
    reference = np.array([[-1.0], [0.2], [1.5]])
    for neurons, weights in (([[0.0], [1.0]], [0.4, 0.6]), ([[0.0], [1.0], [-2.0]], [0.2, 0.3, 0.5])):
        net = NetworkState(kind=kind, neurons=neurons, weights=weights)
        closed = loss(net, Dataset(inputs=reference), LossKind.mmd(reference))
        assert closed == pytest.approx(mmd_brute_force(net, reference), abs=1e-10)


def test_mmd_of_reference_itself_is_zero():
    reference = np.array([[-1.0], [0.5], [2.0], [3.0]])
    kind = NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=1.0, input_dim=1)
    net = NetworkState(kind=kind, neurons=reference, weights=np.full(4, 0.25))
    assert abs(loss(net, Dataset(inputs=reference), LossKind.mmd(reference))) <= 1e-12


def test_mmd_nonnegative(mmd_case):
    net, data, kind = mmd_case
    assert loss(net, data, kind) >= -1e-12


@pytest.mark.parametrize("fixture", ["rbf_problem", "softplus_problem", "mmd_case"])
def test_param_grad_matches_finite_differences(fixture, request):
    net, data, kind = request.getfixturevalue(fixture)
    numeric = fd_grad(_flat(net, data, kind), net.neurons.reshape(-1))
    assert relative_error(param_grad(net, data, kind).reshape(-1), numeric, 1.0) <= 1e-6


def test_param_grad_includes_weight(rbf_problem):
    net, data, kind = rbf_problem
    G = unweighted_gradients(net, data, kind)
    assert np.allclose(param_grad(net, data, kind), net.weights[:, None] * G)


def test_grad_norm():
    assert grad_norm(np.array([[3.0], [4.0]])) == 5.0


def test_outer_derivs_squared_error(rbf_problem):
    net, _, kind = rbf_problem
    with pytest.raises(SplitNetError):
        outer_derivs(net, 0.3, kind)
    phi1, phi2 = outer_derivs(net, 0.3, kind, target=1.0)
    assert phi1 == pytest.approx(-2.0 * (1.0 - forward(net, 0.3)))
    assert phi2 == 2.0


def test_mmd_atoms_balance(mmd_case):
    net, data, kind = mmd_case
    points, coef = outer_atoms(net, data, kind)
    assert points.shape[0] == net.n + kind.reference.shape[0]
    # Σw = 1, así que la medida con signo tiene masa total 0
    assert coef.sum() == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("fixture", ["rbf_problem", "mmd_case"])
def test_assembled_hessian_matches_finite_differences(fixture, request):
    net, data, kind = request.getfixturevalue(fixture)
    H_fd = fd_hessian(_flat(net, data, kind), net.neurons.reshape(-1), FDSpec(step=1e-4)).data
    H = assembled_hessian(net, data, kind)
    assert np.linalg.norm(H - H_fd) / np.linalg.norm(H_fd) <= 1e-5
    T = hessian_T(net, data, kind)
    assert np.allclose(T, T.T, rtol=0, atol=1e-12 * np.abs(T).max())


def test_median_bandwidth():
    assert median_bandwidth([0.0, 1.0, 2.0]) == 1.0
    assert median_bandwidth([[0.0, 0.0], [3.0, 4.0]]) == 5.0


def test_median_bandwidth_degenerate():
    assert median_bandwidth([1.0, 1.0]) == 1.0
