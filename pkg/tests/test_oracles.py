#test_oracles.py
import numpy as np
import pytest
from pydantic import ValidationError

from splitnet.exceptions import NumericalError, SplitNetError
from splitnet.schemas import FDSpec, OptimSpec
from splitnet.splitting import splitting_candidates
from splitnet.verify.oracles import (
    OrderFit, fd_grad, fd_hessian, fd_jacobian, measure_direction_gain, measure_split_gain, order_fit, relative_error,
)

GRID = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


def test_fd_grad_quadratic():
    g = fd_grad(lambda t: float(t @ t), [1.0, 2.0])
    assert np.allclose(g, [2.0, 4.0], atol=1e-8)


def test_fd_grad_constant():
    assert np.array_equal(fd_grad(lambda t: 3.0, [1.0, 2.0, 3.0]), np.zeros(3))


def test_fd_grad_rejects_non_finite():
    with pytest.raises(NumericalError):
        fd_grad(lambda t: float("nan"), [0.0])


def test_fd_hessian_quadratic():
    A = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, -0.3], [0.0, -0.3, 4.0]])
    H = fd_hessian(lambda t: 0.5 * float(t @ A @ t), [0.3, -0.2, 0.1], FDSpec(step=1e-3))
    assert np.allclose(H.data, A, atol=1e-6)
    assert np.array_equal(H.data, H.data.T)


def test_fd_jacobian_shape():
    J = fd_jacobian(lambda t: np.array([t[0] * t[1], t[1]]), [2.0, 3.0])
    assert J.shape == (2, 2)
    assert np.allclose(J, [[3.0, 2.0], [0.0, 1.0]], atol=1e-8)


def test_relative_error_floor():
    assert relative_error([1e-13], [0.0]) == pytest.approx(0.1)
    assert relative_error([1e-13], [0.0], floor=1.0) == pytest.approx(1e-13)


@pytest.mark.parametrize("power", [2.0, 3.0])
def test_order_fit_power_law(power):
    fit = order_fit(lambda e: e ** power, GRID)
    assert fit.slope == pytest.approx(power, abs=1e-2)
    assert fit.verdict(power - 0.5) == "PASS"


def test_order_fit_at_floor():
    fit = order_fit(lambda e: 0.0, GRID)
    assert fit.at_floor
    assert fit.verdict(2.5) == "PASS-BY-FLOOR"


def test_order_fit_requires_span():
    with pytest.raises(SplitNetError):
        order_fit(lambda e: e, (1e-2, 9e-3, 8e-3, 7e-3))
    with pytest.raises(SplitNetError):
        order_fit(lambda e: e, (1e-1, 1e-2, 1e-3))


def test_order_fit_sorts_epsilons():
    fit = order_fit(lambda e: e ** 2, (1e-3, 1e-1, 1e-2, 3e-2))
    assert fit.epsilons == sorted(fit.epsilons, reverse=True)


def test_order_fit_validation():
    with pytest.raises(ValidationError):
        OrderFit(epsilons=[1e-3, 1e-2], residuals=[1.0, 1.0])


def test_gain_zero_epsilon(rbf_problem):
    net, data, kind = rbf_problem
    candidate = splitting_candidates(net, data, kind)[0]
    assert abs(measure_split_gain(net, data, kind, candidate, 0.0)) <= 1e-12


def test_gain_with_retrain_leaves_input_untouched(rbf_problem):
    net, data, kind = rbf_problem
    before = net.neurons.copy()
    gain = measure_direction_gain(net, data, kind, 0, [1.0, 0.0, 0.0], 1e-2, retrain=OptimSpec(max_iters=20))
    assert np.isfinite(gain)
    assert np.array_equal(net.neurons, before)
