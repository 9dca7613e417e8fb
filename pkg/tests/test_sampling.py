import math

import numpy as np
import pytest

from udisc.function_space import SparseFunction, make_trig_real
from udisc.sampling import PointSet, discrete_lp, equispaced, sample_iid


def test_iid_is_deterministic():
    a, b = sample_iid(3, 0), sample_iid(3, 0)
    assert a.nodes.tobytes() == b.nodes.tobytes()
    assert a.provenance == {"kind": "iid", "seed": 0}


def test_iid_mean_near_half():
    x = sample_iid(10**4, 1)
    assert abs(x.nodes.mean() - 0.5) < 0.015


def test_iid_rejects_empty():
    with pytest.raises(ValueError):
        sample_iid(0, 0)


def test_equispaced_examples():
    assert list(equispaced(4).nodes) == [0, 0.25, 0.5, 0.75]
    assert list(equispaced(1).nodes) == [0]
    assert list(equispaced(2).nodes) == [0, 0.5]


def test_pointset_rejects_out_of_range():
    with pytest.raises(ValueError):
        PointSet([0.2, 1.0])
    with pytest.raises(ValueError):
        PointSet([])


def test_json_round_trip_is_exact():
    x = sample_iid(50, 9)
    y = PointSet.from_json(x.to_json())
    assert y.nodes.tobytes() == x.nodes.tobytes()
    assert y.provenance == x.provenance
    assert '"m": 50' in x.to_json()


def test_discrete_lp_examples():
    d = make_trig_real(2)
    const = SparseFunction(d, (0,), [1.0])
    assert discrete_lp(const, sample_iid(7, 3), 1) == 1.0
    cos1 = SparseFunction(d, (1,), [1.0])
    assert abs(discrete_lp(cos1, equispaced(4), 2) - math.sqrt(0.5)) < 1e-12
    cos2 = SparseFunction(d, (3,), [1.0])
    assert abs(discrete_lp(cos2, equispaced(4), 2) - 1.0) < 1e-12


def test_discrete_lp_rejects_infinite_p():
    d = make_trig_real(1)
    with pytest.raises(ValueError):
        discrete_lp(SparseFunction(d, (0,), [1.0]), equispaced(2), np.inf)
