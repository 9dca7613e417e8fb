import math

import numpy as np
import pytest

from udisc.function_space import make_trig_real
from udisc.oracle import (
    OracleConfig,
    interval_cover_count,
    interval_packing_count,
    lacunary_norm,
    ratio_bruteforce,
    sigma_tail_orthonormal,
    trig_values,
)
from udisc.sampling import equispaced, sample_iid
from udisc.verifier import ratio_extremes_p2

D5 = make_trig_real(2)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(grid_size=1024)
    with pytest.raises(ValueError):
        OracleConfig(random_directions=10)


def test_trig_values_columns():
    v = trig_values([0.25], 1)
    np.testing.assert_allclose(v, [[1.0, math.cos(math.pi / 2), 1.0]], atol=1e-15)


def test_bruteforce_examples():
    lo, hi = ratio_bruteforce(equispaced(4), D5, [3], 2.0)
    assert abs(lo - 2) < 1e-6 and abs(hi - 2) < 1e-6
    for p in (1.0, 2.0, 3.0):
        lo, hi = ratio_bruteforce(sample_iid(5, 0), D5, [0], p)
        assert abs(lo - 1) < 1e-12 and abs(hi - 1) < 1e-12


def test_bruteforce_agrees_with_eigen():
    rng = np.random.default_rng(0)
    for trial in range(4):
        G = sorted(rng.choice(D5.N, size=2, replace=False).tolist())
        xi = sample_iid(9, trial)
        lo, hi = ratio_bruteforce(xi, D5, G, 2.0)
        elo, ehi, _, _ = ratio_extremes_p2(xi, D5, G)
        assert abs(lo - elo) < 1e-4 and abs(hi - ehi) < 1e-4


def test_bruteforce_rejects_large_support():
    with pytest.raises(ValueError):
        ratio_bruteforce(equispaced(8), D5, [0, 1, 2, 3], 2.0)


def test_sigma_tail():
    assert abs(sigma_tail_orthonormal([0.6, 0.8], 1) - 0.6) < 1e-15
    assert sigma_tail_orthonormal([0.6, 0.8], 2) == 0.0
    assert sigma_tail_orthonormal([0.6, 0.8], 5) == 0.0
    K = 7
    for m in range(K + 1):
        assert abs(sigma_tail_orthonormal([1 / K] * K, m) - math.sqrt(K - m) / K) < 1e-12


def test_interval_counts():
    assert interval_cover_count(math.sqrt(2), 0.5) == 3
    assert interval_cover_count(1.0, 2.0) == 1
    assert interval_cover_count(1.0, 0.25) == 4
    assert interval_packing_count(math.sqrt(2), 0.5) == 3
    assert interval_packing_count(1.0, 5.0) == 1


def test_lacunary_norm_closed_forms():
    assert abs(lacunary_norm(1, 4) - (3 / 8) ** 0.25) < 1e-12
    for v in (1, 2, 3):
        assert abs(lacunary_norm(v, 2) - math.sqrt(v / 2)) < 1e-12
