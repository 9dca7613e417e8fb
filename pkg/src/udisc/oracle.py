"""Slow, independent reference computations used to cross-check the library.

Nothing here calls the evaluation, verification, entropy or quadrature code
it is meant to check; trigonometric values are recomputed from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate


@dataclass(frozen=True)
class OracleConfig:
    grid_size: int = 8192
    random_directions: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.grid_size < 4096:
            raise ValueError("grid_size must be >= 4096")
        if self.random_directions < 1000:
            raise ValueError("random_directions must be >= 1000")


def trig_values(x, max_frequency: int) -> np.ndarray:
    """Columns ``1, cos(2 pi x), sin(2 pi x), cos(4 pi x), ...`` evaluated directly."""
    x = np.asarray(x, dtype=float).reshape(-1)
    cols = [np.ones_like(x)]
    for k in range(1, max_frequency + 1):
        cols.append(np.cos(2 * math.pi * k * x))
        cols.append(np.sin(2 * math.pi * k * x))
    return np.stack(cols, axis=1)


def element_values(x, dictionary, support) -> np.ndarray:
    mix = np.asarray(dictionary.mixing)[list(support)]
    return trig_values(x, dictionary.max_frequency) @ mix.T


def _ratios(coeffs, at_nodes, at_grid, p):
    num = np.mean(np.abs(coeffs @ at_nodes.T) ** p, axis=1)
    den = np.mean(np.abs(coeffs @ at_grid.T) ** p, axis=1)
    return num / den


def ratio_bruteforce(xi, dictionary, support, p: float, cfg: OracleConfig | None = None):
    """``(min, max)`` of the discrete-to-continuous L_p ratio over ``span(support)``.

    Searches random unit directions and the coordinate axes, then refines
    the best direction of each kind once by a shrinking random walk.
    """
    cfg = cfg or OracleConfig()
    support = list(support)
    if not 1 <= len(support) <= 3:
        raise ValueError("the oracle handles at most three elements")
    nodes = np.asarray(getattr(xi, "nodes", xi), dtype=float).reshape(-1)
    at_nodes = element_values(nodes, dictionary, support)
    at_grid = element_values(np.arange(cfg.grid_size) / cfg.grid_size, dictionary, support)
    rng = np.random.default_rng(cfg.seed)
    k = len(support)
    dirs = rng.standard_normal((cfg.random_directions, k))
    dirs = np.vstack([np.eye(k), dirs / np.linalg.norm(dirs, axis=1, keepdims=True)])
    r = _ratios(dirs, at_nodes, at_grid, p)
    out = []
    for sign, best in ((1.0, int(np.argmin(r))), (-1.0, int(np.argmax(r)))):
        x, val = dirs[best], r[best]
        step = 0.1
        while step > 1e-9:
            cand = x + step * rng.standard_normal((64, k))
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            cr = _ratios(cand, at_nodes, at_grid, p)
            i = int(np.argmin(sign * cr))
            if sign * cr[i] < sign * val:
                x, val = cand[i], cr[i]
            else:
                step *= 0.5
        out.append(float(val))
    return out[0], out[1]


def sigma_tail_orthonormal(coeffs, m: int) -> float:
    """Best m-term L2 error for a combination of orthonormal elements."""
    a = np.sort(np.abs(np.asarray(coeffs, dtype=float)))[::-1]
    return float(math.sqrt(np.sum(a[m:] ** 2)))


def interval_cover_count(a: float, eps: float) -> int:
    """Fewest closed intervals of radius eps covering [-a, a].

    Touching intervals suffice, so exact ratios ``a/eps`` need no extra
    interval; the small offset absorbs rounding in the division.
    """
    if a <= 0 or eps <= 0:
        raise ValueError("a and eps must be positive")
    return max(1, math.ceil(a / eps - 1e-12))


def interval_packing_count(a: float, t: float) -> int:
    """Most points of [-a, a] with pairwise gaps strictly above 2t."""
    if a <= 0 or t <= 0:
        raise ValueError("a and t must be positive")
    # n points need (n - 1) gaps each > 2t inside a length 2a
    return max(1, math.ceil(a / t - 1e-12))


def required_m_quad(p: float, epsilon: float, R: float, H, c_p: float = 1.0,
                    C_p: float = 1.0) -> float:
    """The entropy-integral budget by nested adaptive Gauss-Kronrod quadrature (unrounded)."""
    lo = 0.1 * epsilon ** (1.0 / p)
    if lo >= R:
        return 0.0

    def inner(u):
        val, _ = scipy.integrate.quad(lambda s: H(c_p * epsilon * math.exp(s)),
                                      math.log(u), math.log(R), limit=200)
        return val

    outer, _ = scipy.integrate.quad(lambda s: math.exp(s * p / 2) * math.sqrt(max(inner(math.exp(s)), 0.0)),
                                    math.log(lo), math.log(R), limit=200)
    return C_p * epsilon**-5 * outer**2


def lacunary_norm(v: int, p: float, grid_size: int = 2**16) -> float:
    """``||sum_{j<v} cos(2 pi 2^j x)||_p`` by the rectangle rule."""
    x = np.arange(grid_size) / grid_size
    f = sum(np.cos(2 * math.pi * 2**j * x) for j in range(v))
    return float(np.mean(np.abs(f) ** p) ** (1.0 / p))
