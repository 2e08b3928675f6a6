import pytest

import rhsim


def test_version_and_keys():
    assert rhsim.__version__ == "0.1.0"
    assert "sampling_p" in rhsim.known_keys()


def test_budgets_and_static_values():
    b = rhsim.budgets()
    assert b["acts_per_trefi"] == 165
    assert b["acts_per_trefw"] == 1351680
    assert rhsim.budgets(mitigations_per_trefi=4)["rfm_threshold"] == 41
    assert rhsim.storage_bytes(16, 40, 16) == 1280
    assert rhsim.storage_bytes(16, 40, 32) == 2560
    assert rhsim.graphene_capacity(500) == 5407
    suite = rhsim.standard_suite()
    assert len(suite) == 500
    assert suite[0] == "u_j2_u"


def test_simulate_baseline_and_proteas():
    base = rhsim.simulate(policy="baseline", pattern="uniform:j=20", aligned=True)
    assert base["pattern_id"] == "u_j20_a"
    assert base["max_disturbance"] >= 20000
    assert base["ledger_total"] == base["total_activations"] == 1351680
    pro = rhsim.simulate(policy="proteas", sampling_p=0.01, pattern="uniform:j=20", aligned=True)
    assert pro["max_disturbance"] < base["max_disturbance"] / 5


def test_simulate_is_deterministic():
    kw = dict(policy="proteas", sampling_p=0.05, pattern="nonuniform:j=8,x=3,k=20", seed_index=3)
    assert rhsim.simulate(**kw) == rhsim.simulate(**kw)


def test_config_errors_name_the_key():
    with pytest.raises(rhsim.ConfigError, match="sampling_p"):
        rhsim.simulate(policy="proteas", sampling_p=1.5)
    with pytest.raises(ValueError, match="no_such_key"):
        rhsim.simulate(no_such_key=1)
    with pytest.raises(ValueError):
        rhsim.analytic_sampling_rate(0.01, 0.0)


def test_analytic():
    for k, pct in [(1, 1.2), (2, 2.4), (4, 4.8), (8, 9.6)]:
        assert round(100 * rhsim.analytic_sampling_rate(k / 166, 0.5), 1) == pct


def test_sweep_rows():
    rows = rhsim.sweep(policy="proteas", axis="p", axis_values=[0.01, 0.5], seeds=2,
                       patterns="uniform:j=20;uniform:j=4")
    assert len(rows) == 6
    summary = [r for r in rows if r["pattern_id"] == "suite"]
    assert [r["sampling_p"] for r in summary] == ["0.01", "0.5"]
    assert all(r["kind"] == "summary" for r in summary)
    one = rhsim.sweep_csv(workers=1, policy="proteas", seeds=2, axis="p", axis_values="0.02",
                          patterns="uniform:j=8")
    two = rhsim.sweep_csv(workers=2, policy="proteas", seeds=2, axis="p", axis_values="0.02",
                          patterns="uniform:j=8")
    assert one == two
