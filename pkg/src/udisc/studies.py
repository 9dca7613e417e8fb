"""Empirical scaling of the smallest universal discretization set."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .function_space import Dictionary
from .verifier import SearchPolicy, verify_universal


@dataclass(frozen=True)
class ScalingPoint:
    v: int
    N: int
    p: float
    minimal_m: tuple
    median: float


def minimal_passing_m(dictionary: Dictionary, v: int, p: float, seed: int, m_max: int,
                      epsilon: float = 0.5, policy: SearchPolicy | None = None) -> int | None:
    """Smallest prefix length of one iid sequence whose prefix passes.

    Prefixes of a single seeded sequence are nested, and passing is treated
    as monotone in the prefix length for the binary search.  Returns None
    if even ``m_max`` points fail.
    """
    policy = policy or SearchPolicy(mode="exhaustive")
    x = np.random.default_rng(seed).random(m_max)

    def ok(m):
        return verify_universal(x[:m], dictionary, v, p, epsilon, policy).passed

    if not ok(m_max):
        return None
    lo, hi = 0, m_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def scaling_study(dictionary: Dictionary, vs, p: float, seeds, m_max: int,
                  epsilon: float = 0.5, policy: SearchPolicy | None = None):
    out = []
    for v in vs:
        ms = tuple(minimal_passing_m(dictionary, v, p, s, m_max, epsilon, policy) for s in seeds)
        finite = [m for m in ms if m is not None]
        med = float(np.median(finite)) if len(finite) == len(ms) else math.inf
        out.append(ScalingPoint(int(v), dictionary.N, float(p), ms, med))
    return out


def fit_power_law(x, y) -> tuple[float, float]:
    """Least-squares fit of ``y = c x^alpha`` in log-log coordinates; returns ``(c, alpha)``."""
    alpha, logc = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(math.exp(logc)), float(alpha)
