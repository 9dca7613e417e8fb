import pytest

from udisc.construction import TwoStageParams, stage1_size, stage2_size, two_stage
from udisc.errors import BudgetExhausted, Stage1Failed
from udisc.function_space import make_trig_real
from udisc.verifier import SearchPolicy, verify_universal


def test_sizes():
    assert stage1_size(9) == 338  # ceil(81 log2 18)
    assert stage2_size(9, 2) == 140
    assert stage2_size(5, 1) == 12


def test_params_validation():
    with pytest.raises(ValueError):
        TwoStageParams(epsilon=1.0)
    with pytest.raises(ValueError):
        TwoStageParams(c1=0)
    with pytest.raises(ValueError):
        TwoStageParams(max_retries=-1)


def test_seeded_example_passes_exact_verification():
    d = make_trig_real(4)
    xi, rep = two_stage(d, 2, 2.0, seed=7)
    assert rep.mode == "exact_enumeration"
    assert rep.r_min >= 0.5 and rep.r_max <= 1.5
    again = verify_universal(xi, d, 2, 2.0, 0.5, SearchPolicy(mode="exhaustive"))
    assert again.passed and again.r_max == rep.r_max
    assert xi.provenance["kind"] == "two_stage" and xi.m == 140


def test_full_sparsity_returns_stage1_set():
    d = make_trig_real(2)
    xi, rep = two_stage(d, 5, 2.0, TwoStageParams(c2=1000), seed=0)
    assert xi.m == stage1_size(5)
    assert rep.passed


def test_zero_trials_exhausts_budget():
    d = make_trig_real(4)
    with pytest.raises(BudgetExhausted):
        two_stage(d, 2, 2.0, TwoStageParams(subsample_trials=0, max_retries=30), seed=7)


def test_stage1_failure():
    d = make_trig_real(4)
    with pytest.raises(Stage1Failed):
        two_stage(d, 2, 2.0, TwoStageParams(c1=0.05, max_retries=3), seed=0)


def test_deterministic_given_seed():
    d = make_trig_real(4)
    a, _ = two_stage(d, 2, 2.0, seed=3)
    b, _ = two_stage(d, 2, 2.0, seed=3)
    assert a.to_json() == b.to_json()
