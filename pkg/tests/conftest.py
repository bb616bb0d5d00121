#conftest.py
import numpy as np
import pytest
from typer.testing import CliRunner

from splitnet.main_factory import create_app
from splitnet.models import Dataset, LossKind, NetworkState, NeuronKind, NeuronTag
from splitnet.storage import out_dir_context
from splitnet.verify.properties import mmd_problem, regression_problem, repelled_particle_problem, twin_point_problem


@pytest.fixture
def rbf_kind():
    return NeuronKind(tag=NeuronTag.RBF1D)


@pytest.fixture
def softplus_kind():
    return NeuronKind(tag=NeuronTag.SOFTPLUS_UNIT, beta=10.0, input_dim=2)


@pytest.fixture
def particle_kind():
    return NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=1.0, input_dim=2)


@pytest.fixture
def rbf_problem():
    """3 neuronas RBF aleatorias y 50 puntos sin ruido"""
    return regression_problem(0)


@pytest.fixture
def softplus_problem():
    return regression_problem(0, NeuronTag.SOFTPLUS_UNIT)


@pytest.fixture
def mmd_case():
    return mmd_problem(0)


@pytest.fixture
def twin_point():
    return twin_point_problem()


@pytest.fixture
def repelled_particle():
    return repelled_particle_problem()


@pytest.fixture
def single_bump():
    """Datos generados por una sola neurona RBF"""
    kind = NeuronKind(tag=NeuronTag.RBF1D)
    truth = NetworkState(kind=kind, neurons=[[1.0, 0.5, 2.0]], weights=[1.0])
    x = np.linspace(-3.0, 3.0, 60)
    from splitnet.neurons import forward_batch

    return truth, Dataset(inputs=x, targets=forward_batch(truth, x)), LossKind.squared_error()


@pytest.fixture
def out_dir(tmp_path):
    """Directorio de salida de prueba vía el override del contexto"""
    token = out_dir_context.set(tmp_path)
    yield tmp_path
    out_dir_context.reset(token)


@pytest.fixture
def app(tmp_path):
    app = create_app(out_dir_override=tmp_path)
    yield app
    out_dir_context.set(None)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_ini(tmp_path):
    def _write(text: str, name: str = "config.ini"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write
