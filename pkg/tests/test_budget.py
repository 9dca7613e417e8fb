import math

import numpy as np
import pytest

from udisc.budget import (
    BudgetParams,
    ChernoffFamily,
    ChernoffLevel,
    LatticeNet,
    budgets_to_csv,
    bl2_condition,
    bl2_monte_carlo,
    compare_budgets,
    budget_shape,
    epsilon_schedule,
    feasible_m,
    indicator_family,
    level_bounds,
    make_partition_schedule,
    net_partition,
    required_m_integral,
    required_m_lemma41,
    schedule_at,
    schedule_constant,
    schedule_family,
)
from udisc.entropy import ClassSpec
from udisc.errors import NetDeficient
from udisc.function_space import NormSpec, SparseFunction, lp_norm, make_trig_real, random_sparse
from udisc.oracle import required_m_quad


def single(m_level=1.0, eta=0.5, card=1):
    return ChernoffFamily([ChernoffLevel(M=m_level, eta=eta, card=card)])


def test_bl2_examples():
    lhs, ok = bl2_condition(single(), 64)
    assert abs(lhs - 2 * math.exp(-2)) < 1e-12 and ok
    lhs, ok = bl2_condition(single(), 8)
    assert abs(lhs - 2 * math.exp(-0.25)) < 1e-12 and not ok
    assert bl2_condition(ChernoffFamily(), 5) == (0.0, True)


def test_bl2_huge_cardinality_in_logs():
    fam = ChernoffFamily([ChernoffLevel(M=1.0, eta=0.5, log_card=2000.0)])
    lhs, ok = bl2_condition(fam, 10**6)
    assert ok and lhs == 0.0


def test_chernoff_level_validation():
    with pytest.raises(ValueError):
        ChernoffLevel(M=1.0, eta=1.0, card=1)
    with pytest.raises(ValueError):
        ChernoffLevel(M=0.0, eta=0.5, card=1)
    with pytest.raises(ValueError):
        ChernoffLevel(M=1.0, eta=0.5, card=0.5)
    with pytest.raises(ValueError):
        ChernoffLevel(M=1.0, eta=0.5)


def test_epsilon_schedule_examples():
    eps, total = epsilon_schedule([(1.0, math.e / 8)], 8.0, 16)
    assert abs(eps[0] - 1.0) < 1e-12 and abs(total - 1.0) < 1e-12
    e1, _ = epsilon_schedule([(2.0, 5.0), (0.5, 3.0)], 8.0, 10)
    e4, _ = epsilon_schedule([(2.0, 5.0), (0.5, 3.0)], 8.0, 40)
    np.testing.assert_allclose(e4, e1 / 2)
    eps, _ = epsilon_schedule([(1.0, (1 + 1e-12) / 8)], 8.0, 1)
    assert eps[0] < 1e-5


def test_level_bounds_relations():
    for eps, p, R in [(0.2, 1.0, 4.0), (0.5, 2.0, 1.0), (0.1, 1.5, 7.3)]:
        j0, J = level_bounds(eps, p, R)
        q = 1 + 0.01 * eps
        assert q ** (J - 1) <= R < q**J
        assert q ** (j0 * p) <= eps / 5 <= q ** ((j0 + 1) * p)
        assert j0 < 0 <= J


def test_required_m_lemma41():
    assert required_m_lemma41(8, 1, 1, 2, 0.5) == 3072
    a = required_m_lemma41(64, 1, 1, 2, 0.25)
    b = required_m_lemma41(64, 1, 1, 2, 0.125)
    assert abs(b / a - 4 * (1 + 1 / math.log2(2 / 0.25))) < 1e-3
    r = required_m_lemma41(128, 1, 1, 2, 0.5) / required_m_lemma41(64, 1, 1, 2, 0.5)
    assert abs(r - 4 * 7 / 6) < 1e-3
    with pytest.raises(ValueError):
        required_m_lemma41(8, 1, 1, 1.5, 0.5)


def test_compare_budgets():
    rec = compare_budgets(16, 1024, 2, 10)
    assert rec["new"] == 48400.0 and rec["old_p2"] == 2560
    assert abs(rec["old_p1"] - 256 * 10**4.5) < 1e-6 and rec["p_gt2"] is None
    assert compare_budgets(1, 100, 2, 3)["new"] == math.log2(200) ** 2
    ratios = [compare_budgets(v, 64, 2, 4)["new"] / compare_budgets(v, 64, 2, 4)["old_p2"]
              for v in (10, 100, 1000, 10000)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert compare_budgets(4, 64, 4, 4)["p_gt2"] == 16 * 49


def test_budgets_monotone():
    assert compare_budgets(5, 64, 2, 4)["new"] < compare_budgets(6, 64, 2, 4)["new"]
    assert compare_budgets(5, 64, 2, 4)["new"] < compare_budgets(5, 65, 2, 4)["new"]
    assert required_m_lemma41(9, 1, 1, 2, 0.3) > required_m_lemma41(8, 1, 1, 2, 0.3)
    assert required_m_lemma41(8, 1, 1, 2, 0.3) > required_m_lemma41(8, 1, 1, 2, 0.4)


def test_budgets_csv():
    text = budgets_to_csv([compare_budgets(16, 1024, 2, 10)])
    header, row = text.splitlines()
    assert header == "v,N,p,n_hc,d,old_p1,old_p2,new,p_gt2"
    assert row.split(",")[6:] == ["2560", "48400.0", ""]


def test_budget_params_validation():
    BudgetParams()
    with pytest.raises(ValueError):
        BudgetParams(K=1.5)
    with pytest.raises(ValueError):
        BudgetParams(B1=0.5)


def test_required_m_integral_zero_entropy():
    assert required_m_integral(1.0, 0.5, 3.0, lambda t: 0.0) == 0


def test_required_m_integral_matches_quad_oracle():
    for p, eps, R in [(1.0, 0.5, 3.0), (2.0, 0.25, 5.0)]:
        H = lambda t: 2.0
        m = required_m_integral(p, eps, R, H)
        ref = required_m_quad(p, eps, R, H)
        assert abs(m - ref) <= 1e-4 * ref + 1


def test_required_m_integral_smooth_entropy_matches_quad_oracle():
    H = lambda t: 4.0 * (1.0 / t) ** 2
    m = required_m_integral(2.0, 0.5, 2.0, H)
    ref = required_m_quad(2.0, 0.5, 2.0, H)
    assert abs(m - ref) <= 1e-4 * ref + 1


def _tiny_class(p=1.0, v=2, n=1):
    d = make_trig_real(n)
    spec = ClassSpec(d, v, p)
    cr = max(spec.coefficient_radius(list(s)) for s in spec.supports())
    return d, spec, LatticeNet(d, v, cr), max(1.0, spec.radius())


def test_lattice_net_distance_and_size():
    d, spec, net, _ = _tiny_class()
    f = random_sparse(d, 2, np.random.default_rng(0))
    for r in (0.5, 0.05, 0.001):
        q = net.approximate(f, r)
        db = np.abs((f.coeffs - q) @ d.mixing[list(f.support)])
        assert db.sum() <= r
    assert net.log_size(100.0) == 0.0
    assert net.log_size(0.01) > net.log_size(0.1) > 0


def test_net_partition_zero_function():
    d, spec, net, R = _tiny_class()
    sch = make_partition_schedule(0.2, 1.0, R, lambda j: 1.0)
    grid = np.arange(256) / 256
    h, level = net_partition(SparseFunction(d, (), []), net, sch, 1.0, grid)
    assert np.all(h == 0) and np.all(level == sch.j0)


def test_net_partition_bound_small_sample():
    d, spec, net, R = _tiny_class()
    eps, p = 0.2, 1.0
    sch = make_partition_schedule(eps, p, R, lambda j: 1.0)
    grid = np.arange(1024) / 1024
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = random_sparse(d, 2, rng)
        f = f.scaled(1 / lp_norm(f, NormSpec(p, 2**14)))
        h, level = net_partition(f, net, sch, p, grid)
        assert np.max(np.abs(np.abs(f(grid)) ** p - h**p)) <= eps / 4
        assert set(np.unique(level)) <= set(range(sch.j0, sch.J + 1))


def test_net_partition_detects_deficient_net():
    d, spec, net, R = _tiny_class()
    bad = LatticeNet(d, 1, net.coef_radius)  # spacing too coarse for v = 2
    sch = make_partition_schedule(0.2, 1.0, R, lambda j: 1.0)
    f = SparseFunction(d, (1, 2), [0.3141, -0.2718])
    with pytest.raises(NetDeficient):
        net_partition(f, bad, sch, 1.0, np.arange(64) / 64)


def test_schedule_feasible_at_integral_budget():
    for p, eps in [(1.0, 0.5), (2.0, 0.5)]:
        d, spec, net, R = _tiny_class(p=p, v=1)
        a = 0.01 * eps
        sch = make_partition_schedule(eps, p, R, lambda j: net.log_size(a * (1 + a) ** j))
        m = required_m_integral(p, eps, R, net.entropy_bits, c_p=0.01, C_p=schedule_constant())
        assert m >= feasible_m(sch)
        at = schedule_at(sch, m)
        assert sum(lv.eps for lv in at.levels) <= eps / 4
        assert bl2_condition(schedule_family(at), m)[1]


def test_budget_shape_formula():
    assert abs(budget_shape(0.5, 4, 1) - 0.5**-6 * 4 * 9) < 1e-9


def test_indicator_family_l1_bounds():
    levels = indicator_family(make_trig_real(2), [1.0, 2.0], 3, 2, seed=0)
    for members in levels:
        for f in members:
            assert 0 < f.l1 <= 1.0
            vals = f(np.linspace(0, 1, 100, endpoint=False))
            assert set(np.unique(vals)) <= {0.0, f.M}


def test_bl2_monte_carlo_small():
    levels = indicator_family(make_trig_real(2), [1.0, 2.0], 4, 2, seed=1)
    frac = bl2_monte_carlo(levels, [0.3, 0.3], 400, range(20))
    assert frac >= 0.5
