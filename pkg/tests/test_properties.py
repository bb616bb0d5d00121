#test_properties.py
import pytest

from splitnet.verify.properties import PROPERTIES, Outcome, Property, Tier, register, run_properties
from splitnet.verify.registry import ANALYTIC_PATHS, COVERED_PATHS, mark_covered, uncovered_paths

QUICK_CHECKS = [
    "oracle_registry",
    "order_fit_selftest",
    "eigensolver",
    "neuron_derivatives",
    "outer_derivs_fd",
    "splitting_matrix_fd",
    "hessian_decomposition",
    "split_decomposition",
    "optimal_split_gain",
    "positive_index_no_gain",
    "split_additivity",
    "split_all_rate",
    "descent_rate",
    "direction_optimality",
    "split_invariance",
    "weight_conservation",
    "mmd_closed_form",
    "permutation_invariance",
]


def test_every_analytic_path_has_one_oracle():
    assert ANALYTIC_PATHS == {
        "neuron_grad", "neuron_hess", "outer_derivs", "param_grad", "splitting_matrix", "hessian_decomposition",
    }
    assert uncovered_paths() == set()
    assert COVERED_PATHS["neuron_hess"] == "neuron_derivatives"


def test_second_oracle_for_same_path_is_rejected():
    with pytest.raises(ValueError):
        mark_covered(["param_grad"], "another_check")


@pytest.mark.parametrize("name", QUICK_CHECKS)
def test_quick_property_passes(name):
    [result] = run_properties(names=[name])
    assert result.passed, f"{result.name}: {result.status} {result.measured} {result.detail}"


@pytest.mark.slow
@pytest.mark.parametrize("name", ["param_grad_fd", "mmd_nonnegative", "determinism"])
def test_slower_quick_property_passes(name):
    [result] = run_properties(names=[name])
    assert result.passed, f"{result.name}: {result.status} {result.detail}"


def test_full_tier_skipped_by_default(monkeypatch):
    from splitnet.verify import properties

    fake = {
        "quick_one": Property(name="quick_one", tier=Tier.QUICK, check=lambda: Outcome(status="PASS")),
        "full_one": Property(name="full_one", tier=Tier.FULL, check=lambda: Outcome(status="FAIL")),
    }
    monkeypatch.setattr(properties, "PROPERTIES", fake)
    assert [r.name for r in run_properties()] == ["quick_one"]
    assert [r.name for r in run_properties(full=True)] == ["quick_one", "full_one"]
    assert PROPERTIES["angle_sweep_shape"].tier == Tier.FULL

def test_exception_becomes_fail():
    @register("always_raises")
    def always_raises() -> Outcome:
        raise RuntimeError("boom")

    try:
        [result] = run_properties(names=["always_raises"])
        assert result.status == "FAIL"
        assert "boom" in result.detail
    finally:
        PROPERTIES.pop("always_raises")


def test_split_gain_check_rejects_wrong_prediction(twin_point):
    from splitnet.splitting import splitting_candidates
    from splitnet.verify.properties import _split_gain_outcome

    net, data, kind = twin_point
    candidate = splitting_candidates(net, data, kind)[0]
    assert _split_gain_outcome(net, data, kind, candidate).status == "PASS"
    doubled = candidate.model_copy(update={"splitting_index": 2.0 * candidate.splitting_index})
    outcome = _split_gain_outcome(net, data, kind, doubled)
    assert outcome.status == "FAIL"
    assert "error relativo" in outcome.detail


def test_regression_optimum_lowers_gradient():
    from splitnet.loss import grad_norm, param_grad
    from splitnet.verify.properties import regression_optimum, regression_problem

    start, data, kind = regression_problem(1)
    net, _, _ = regression_optimum(1)
    assert grad_norm(param_grad(net, data, kind)) < grad_norm(param_grad(start, data, kind))


def test_mmd_discrepancy_compares_every_round(tmp_path, monkeypatch):
    from splitnet.csvlog import read_table
    from splitnet.verify import properties

    calls = []
    original = properties.mmd_brute_force

    def counting(net, reference):
        calls.append(net.n)
        return original(net, reference)

    monkeypatch.setattr(properties, "mmd_brute_force", counting)
    summary, gap = properties.mmd_round_discrepancy(properties.tiny_config("MMD_COMPRESS"), tmp_path)
    ends = [int(r["neuron_count"]) for r in read_table(tmp_path / "run.csv") if r["event"] == "round_end"]
    assert calls == ends
    assert calls[-1] == summary.neuron_count
    assert gap <= 1e-10
