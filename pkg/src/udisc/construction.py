"""Two-stage random construction of universal discretization sets.

Stage 1 draws a dense iid set of size about ``N^2 log N`` that discretizes
the whole span ``X_N`` within (4/5, 6/5) at exponents p and 2.  Stage 2
subsamples it down to ``~ v (log N)^2 (log 2v)^2`` points, keeping the first
random subset whose verifier report passes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BudgetExhausted, Stage1Failed
from .function_space import Dictionary
from .sampling import PointSet
from .verifier import SearchPolicy, ratio_extremes_p2, verify_universal, DiscretizationReport

STAGE1_LOW, STAGE1_HIGH = 4 / 5, 6 / 5


@dataclass(frozen=True)
class TwoStageParams:
    c1: float = 1.0
    c2: float = 1.0
    epsilon: float = 0.5
    max_retries: int = 100
    subsample_trials: int = 200

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 and c2 must be positive")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.max_retries < 0 or self.subsample_trials < 0:
            raise ValueError("max_retries and subsample_trials must be >= 0")


def stage1_size(N: int, c1: float = 1.0) -> int:
    return math.ceil(c1 * N**2 * math.log2(2 * N))


def stage2_size(N: int, v: int, c2: float = 1.0) -> int:
    return math.ceil(c2 * v * math.log2(2 * N) ** 2 * math.log2(2 * v) ** 2)


def _stage1_ok(nodes, dictionary: Dictionary, p: float, policy: SearchPolicy) -> bool:
    lo, hi, _, _ = ratio_extremes_p2(nodes, dictionary, range(dictionary.N))
    if not (STAGE1_LOW <= lo and hi <= STAGE1_HIGH):
        return False
    if p == 2:
        return True
    rep = verify_universal(nodes, dictionary, dictionary.N, p, 0.2, policy)
    return STAGE1_LOW <= rep.r_min and rep.r_max <= STAGE1_HIGH


def two_stage(dictionary: Dictionary, v: int, p: float, params: TwoStageParams | None = None,
              seed: int = 0, policy: SearchPolicy | None = None):
    """Construct a point set for ``Sigma_v`` and return it with its verifier report.

    Each of the ``max_retries + 1`` rounds redraws the stage-1 set until it
    passes, then tries ``subsample_trials`` random subsets of the target
    size.  Trials run in a fixed order, so the lowest passing trial wins.
    """
    params = params or TwoStageParams()
    if not 1 <= v <= dictionary.N:
        raise ValueError(f"v must lie in [1, {dictionary.N}]")
    if not 1.0 <= p <= 2.0:
        raise ValueError("p must lie in [1, 2]")
    policy = policy or SearchPolicy(mode="auto")
    N = dictionary.N
    m1 = stage1_size(N, params.c1)
    m = stage2_size(N, v, params.c2)
    rng = np.random.default_rng(seed)
    provenance = {"kind": "two_stage", "seed": int(seed), "params": asdict(params),
                  "v": int(v), "p": float(p), "m1": m1, "m_target": m}

    stage1_passed = False
    for round_ in range(params.max_retries + 1):
        base = rng.random(m1)
        if not _stage1_ok(base, dictionary, p, policy):
            continue
        stage1_passed = True
        if m >= m1:
            report = verify_universal(base, dictionary, v, p, params.epsilon, policy)
            if report.passed:
                prov = dict(provenance, round=round_, trial=None, m=m1)
                return PointSet(base, prov), report
            continue
        for trial in range(params.subsample_trials):
            idx = np.sort(rng.choice(m1, size=m, replace=False))
            report = verify_universal(base[idx], dictionary, v, p, params.epsilon, policy)
            if report.passed:
                prov = dict(provenance, round=round_, trial=trial, m=m)
                return PointSet(base[idx], prov), report
    if not stage1_passed:
        raise Stage1Failed(f"no stage-1 set of size {m1} passed in {params.max_retries + 1} draws")
    raise BudgetExhausted(
        f"no subset of size {m} passed after {params.subsample_trials} trials "
        f"in each of {params.max_retries + 1} rounds"
    )


__all__ = ["TwoStageParams", "two_stage", "stage1_size", "stage2_size", "DiscretizationReport"]
