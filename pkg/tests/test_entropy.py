import math

import numpy as np
import pytest

from udisc.entropy import (
    ClassSpec,
    TransferParams,
    covering_upper,
    empirical_nikolskii_log,
    entropy_budget_p,
    entropy_budget_p2,
    entropy_lower_log,
    estimate,
    estimates_to_csv,
    packing_lower,
    transfer_rhs,
)
from udisc.errors import NonterminatingSum
from udisc.function_space import make_trig_real
from udisc.oracle import interval_cover_count, interval_packing_count

SEGMENT = ClassSpec(make_trig_real(1).restrict([1]), 1, 2.0)
N5V1 = ClassSpec(make_trig_real(2), 1, 2.0)


def test_segment_covering_matches_interval():
    est = covering_upper(SEGMENT, 0.5)
    assert est.count_upper == 3 == interval_cover_count(math.sqrt(2), 0.5)
    assert abs(est.upper_bits - math.log2(3)) < 1e-12


def test_segment_large_radius_single_ball():
    assert covering_upper(SEGMENT, math.sqrt(2)).count_upper == 1
    assert covering_upper(SEGMENT, 5.0).count_upper == 1


def test_covering_precondition():
    with pytest.raises(ValueError):
        covering_upper(SEGMENT, 0.5, delta=0.5)
    with pytest.raises(ValueError):
        covering_upper(SEGMENT, -1.0)


def test_segment_packing_matches_interval():
    assert packing_lower(SEGMENT, 0.5).count_lower == interval_packing_count(math.sqrt(2), 0.5) == 3
    assert packing_lower(SEGMENT, 10.0).count_lower == 1


@pytest.mark.parametrize("t", [0.3, 0.7])
def test_packing_covering_order(t):
    up = covering_upper(N5V1, t)
    assert packing_lower(N5V1, 2 * t).count_lower <= up.count_upper


def test_estimate_and_csv():
    est = estimate(SEGMENT, 0.5)
    assert est.count_lower == 3 and est.count_upper == 3
    text = estimates_to_csv([est])
    assert text.splitlines()[0].startswith("epsilon,lower_bits,upper_bits")
    assert text.endswith("\r\n")


def test_l2_metric_cover():
    est = covering_upper(SEGMENT, 0.5, metric="l2")
    # the segment is [-1, 1] in L2 (cos has norm sqrt(1/2))
    assert est.count_upper >= interval_cover_count(1.0, 0.5)


def test_budget_formulas():
    assert abs(entropy_budget_p2(4, 4, 256) - 9.0) < 1e-12
    assert abs(entropy_budget_p2(1, 1, 2) - 2.0) < 1e-12
    vals = [entropy_budget_p2(k, 3, 10) for k in (1, 10, 100, 1000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert abs(entropy_budget_p(5, 3, 7, 2.0) - entropy_budget_p2(5, 3, 7)) < 1e-12
    assert abs(entropy_budget_p(4, 4, 256, 1.0) - 81.0) < 1e-12
    assert abs(entropy_budget_p(16, 4, 256, 1.0) - 81.0 / 4) < 1e-12


def test_transfer_params():
    tp = TransferParams(1.0)
    assert tp.theta == 0.5 and tp.a == 2.0
    with pytest.raises(ValueError):
        TransferParams(2.0)


def test_transfer_rhs_examples():
    tp = TransferParams(1.0)
    assert transfer_rhs(1.0, tp, lambda t: 0.0, 1.0) == 0.0
    step = lambda t: 1.0 if t < 1 else 0.0
    assert transfer_rhs(1.0, tp, step, 1.0) == 4.0
    with pytest.raises(NonterminatingSum):
        transfer_rhs(1.0, tp, lambda t: 1.0, 1.0)


def test_entropy_lower_log():
    assert entropy_lower_log(1.0, 8.0) == 1.0
    assert entropy_lower_log(2.0, 8.0) == 0.0
    assert entropy_lower_log(4.0, 8.0) == -1.0


def test_budget_consistency_on_tiny_class():
    # the measured entropy at the budget scale stays below k
    for k in (1, 2, 3):
        t = entropy_budget_p2(k, 1, N5V1.dictionary.N)
        assert covering_upper(N5V1, t).upper_bits <= k


def test_empirical_nikolskii_constant_finite():
    d = make_trig_real(3)
    c0 = empirical_nikolskii_log(d, np.arange(64) / 64, n_samples=50)
    assert 1.0 <= c0 < 10.0
