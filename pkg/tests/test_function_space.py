import math

import numpy as np
import pytest

from udisc.errors import DegenerateSystem, FrequencyOverflow
from udisc.function_space import (
    NormSpec,
    SparseFunction,
    evaluate,
    lacunary_function,
    lp_norm,
    make_perturbed_riesz,
    make_trig_real,
    sup_norm,
)


def one(d, j, c=1.0):
    return SparseFunction(d, (j,), [c])


def test_trig_real_small_grams():
    d1 = make_trig_real(1)
    assert d1.N == 3
    np.testing.assert_allclose(d1.gram, np.diag([1, 0.5, 0.5]))
    d0 = make_trig_real(0)
    assert d0.N == 1
    np.testing.assert_allclose(d0.gram, [[1.0]])


def test_trig_real_riesz_constants():
    d = make_trig_real(2)
    assert abs(d.riesz_lower - math.sqrt(0.5)) < 1e-12
    assert abs(d.riesz_upper - 1.0) < 1e-12


def test_trig_real_element_order():
    d = make_trig_real(2)
    x = np.array([0.1, 0.3])
    vals = d.evaluate(x)
    np.testing.assert_allclose(vals[:, 3], np.cos(4 * np.pi * x))
    np.testing.assert_allclose(vals[:, 4], np.sin(4 * np.pi * x))


def test_negative_frequency_rejected():
    with pytest.raises(ValueError):
        make_trig_real(-1)


def test_perturbed_zero_delta_matches_trig():
    d = make_perturbed_riesz(3, 0.0, seed=4)
    t = make_trig_real(3)
    np.testing.assert_allclose(d.gram, t.gram)
    assert abs(d.riesz_lower - t.riesz_lower) < 1e-12
    assert abs(d.riesz_upper - t.riesz_upper) < 1e-12


def test_perturbed_riesz_example():
    d = make_perturbed_riesz(2, 0.25, seed=1)
    assert d.riesz_lower < math.sqrt(0.5) < 1.0 <= d.riesz_upper * 1.25
    assert np.linalg.eigvalsh(d.gram)[0] > 0
    assert all(d.permutation[i] != i for i in range(d.N))


def test_perturbed_elements_bounded_by_one():
    d = make_perturbed_riesz(4, 0.4, seed=2)
    vals = d.grid_values(4096)
    assert np.max(np.abs(vals)) <= 1.0 + 1e-12


def test_perturbed_rejects_large_delta():
    with pytest.raises(ValueError):
        make_perturbed_riesz(2, 0.6, seed=0)


def test_degenerate_system_error_type():
    assert issubclass(DegenerateSystem, Exception)


def test_evaluate_examples():
    d = make_trig_real(1)
    assert evaluate(one(d, 0), 0.37) == 1.0
    assert evaluate(one(d, 1), 0.0) == 1.0
    assert abs(evaluate(one(d, 2), 0.25) - 1.0) < 1e-15


def test_evaluate_vector_shape():
    d = make_trig_real(1)
    out = evaluate(one(d, 1), np.zeros((2, 3)))
    assert out.shape == (2, 3)


def test_lp_norm_examples():
    d = make_trig_real(1)
    assert abs(lp_norm(one(d, 1), NormSpec(2)) - math.sqrt(0.5)) < 1e-12
    for p in (1, 2, 3.5, 6):
        assert abs(lp_norm(one(d, 0), NormSpec(p)) - 1.0) < 1e-12
    assert abs(lp_norm(one(d, 1), NormSpec(4)) - (3 / 8) ** 0.25) < 1e-8


def test_norm_spec_resolution_check():
    d = make_trig_real(64)
    with pytest.raises(ValueError):
        NormSpec(4, grid_size=256).check_resolution(d)


def test_sup_norm_examples():
    d = make_trig_real(4)
    lo, hi = sup_norm(one(d, 1))
    assert lo == 1.0 and hi >= 1.0
    assert sup_norm(one(d, 0)) == (1.0, 1.0)
    f = SparseFunction(d, (3, 7), [1.0, 1.0])
    lo, hi = sup_norm(f)
    assert lo == 2.0 and hi >= 2.0


def test_lacunary_examples():
    d = make_trig_real(4)
    f = lacunary_function(2, d)
    assert f.sparsity == 2
    assert sup_norm(f)[0] == 2.0
    assert abs(lp_norm(f, NormSpec(2)) - 1.0) < 1e-12
    with pytest.raises(FrequencyOverflow):
        lacunary_function(3, d)


def test_sparse_function_validation():
    d = make_trig_real(1)
    with pytest.raises(ValueError):
        SparseFunction(d, (1, 0), [1, 1])
    with pytest.raises(ValueError):
        SparseFunction(d, (0, 3), [1, 1])
    with pytest.raises(ValueError):
        SparseFunction(d, (0,), [1, 1])
    f = SparseFunction.from_dense(d, [0.0, 2.0, 0.0])
    assert f.support == (1,) and f.sparsity == 1
