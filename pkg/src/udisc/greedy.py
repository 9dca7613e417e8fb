"""m-term approximation by orthogonal greedy (L2) and weak Chebyshev greedy (L_p).

Both algorithms work with the L2-normalized elements ``psi_j = phi_j / ||phi_j||_2``.
Targets are given either as a :class:`SparseFunction` or as a length-N
coefficient vector over the dictionary elements ``phi_j``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, SingularGram
from .function_space import Dictionary, SparseFunction

TIE_RTOL = 1e-10
INNER_TOL = 1e-9
INNER_MAX_ITER = 10**4


@dataclass(frozen=True)
class GreedyTrace:
    """Residual norms ``sigma_0 >= sigma_1 >= ...`` and the selected indices."""

    target: str
    algorithm: str
    residual_norms: tuple
    selected_indices: tuple
    t_weak: float = 1.0
    p: float = 2.0
    coefficients: tuple = field(default=(), compare=False)

    @property
    def m(self) -> int:
        return len(self.selected_indices)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["step", "selected_index", "residual_norm"])
        for step, r in enumerate(self.residual_norms):
            sel = "" if step == 0 else self.selected_indices[step - 1]
            w.writerow([step, sel, repr(float(r))])
        return buf.getvalue()


@dataclass(frozen=True)
class SmoothnessSpec:
    """Power-type modulus of smoothness ``rho(L_p, u) <= gamma u^s``."""

    p: float
    s: float = 2.0
    gamma: float | None = None

    def __post_init__(self):
        if not 2.0 <= self.p < math.inf:
            raise ValueError("p must be finite and >= 2")
        if self.gamma is None:
            object.__setattr__(self, "gamma", (self.p - 1.0) / 2.0)
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def rho_bound(self, u: float) -> float:
        return self.gamma * u**self.s


def _target_coeffs(target, dictionary: Dictionary) -> tuple[np.ndarray, str]:
    if isinstance(target, SparseFunction):
        if target.dictionary is not dictionary and target.dictionary.N != dictionary.N:
            raise ValueError("target lives on a different dictionary")
        return target.dense, f"sparse(support={list(target.support)})"
    c = np.asarray(target, dtype=float).reshape(-1)
    if c.shape != (dictionary.N,):
        raise ValueError(f"expected {dictionary.N} coefficients")
    return c, f"coeffs(nnz={int(np.count_nonzero(c))})"


def _pick(scores, taken, threshold_factor=1.0) -> int:
    """Smallest free index whose score reaches ``threshold_factor * max``."""
    s = np.where(taken, -np.inf, scores)
    best = np.max(s)
    cut = threshold_factor * best - TIE_RTOL * max(best, 1e-300)
    return int(np.flatnonzero(s >= cut)[0])


def ogp(target, dictionary: Dictionary, m: int) -> GreedyTrace:
    """Orthogonal greedy pursuit in L2 with exact Gram arithmetic."""
    N = dictionary.N
    if not 0 <= m <= N:
        raise ValueError(f"m must lie in [0, {N}]")
    c, desc = _target_coeffs(target, dictionary)
    norms = dictionary.norms
    # work in the psi basis: Gram becomes a correlation matrix
    gram = np.asarray(dictionary.gram) / np.outer(norms, norms)
    a = c * norms
    taken = np.zeros(N, dtype=bool)
    selected: list[int] = []
    resid = a.copy()
    residuals = [math.sqrt(max(a @ gram @ a, 0.0))]
    x = np.zeros(0)
    for _ in range(m):
        j = _pick(np.abs(gram @ resid), taken)
        taken[j] = True
        selected.append(j)
        g_ss = gram[np.ix_(selected, selected)]
        try:
            cho = scipy.linalg.cho_factor(g_ss)
        except np.linalg.LinAlgError as exc:
            raise SingularGram(f"Gram block on {selected} is singular") from exc
        x = scipy.linalg.cho_solve(cho, (gram @ a)[selected])
        resid = a.copy()
        resid[selected] -= x
        residuals.append(math.sqrt(max(resid @ gram @ resid, 0.0)))
    # projection errors are nonincreasing in exact arithmetic; clip rounding noise
    residuals = np.minimum.accumulate(residuals)
    coeffs = tuple(float(v) for v in x / norms[selected]) if selected else ()
    return GreedyTrace(desc, "ogp", tuple(map(float, residuals)), tuple(selected),
                       coefficients=coeffs)


def _lp_obj(r, p):
    ar = np.abs(r)
    return float(np.mean(ar**p))


def best_lp_approximation(y, basis, p: float):
    """Minimize ``mean |y - basis @ x|^p`` over x by damped Newton.

    ``basis`` holds grid values column-wise; the start is the L2 projection.
    Returns ``(x, residual)``.
    """
    k = basis.shape[1]
    if k == 0:
        return np.zeros(0), y.copy()
    x = np.linalg.lstsq(basis, y, rcond=None)[0]
    r = y - basis @ x
    obj = _lp_obj(r, p)
    scale = max(_lp_obj(y, p), 1e-300)
    if p == 2.0 or obj <= 1e-30 * scale:
        return x, r
    for _ in range(INNER_MAX_ITER):
        ar = np.abs(r)
        w = ar ** (p - 2.0)
        grad = -p * (basis.T @ (w * r)) / r.size
        hess = p * (p - 1.0) * (basis.T * w) @ basis / r.size
        hess[np.diag_indices(k)] += 1e-14 * max(np.trace(hess), 1e-300)
        try:
            step = -scipy.linalg.solve(hess, grad, assume_a="pos")
        except (np.linalg.LinAlgError, ValueError):
            step = -grad
        t = 1.0
        while True:
            xn = x + t * step
            rn = y - basis @ xn
            on = _lp_obj(rn, p)
            if on <= obj or t < 1e-12:
                break
            t *= 0.5
        moved = t * np.max(np.abs(step))
        if on <= obj:
            x, r, obj = xn, rn, on
        if moved <= INNER_TOL * max(1.0, np.max(np.abs(x))) or obj <= 1e-30 * scale:
            return x, r
        if t < 1e-12:
            break
    raise ConvergenceFailure(f"L_{p} best approximation stalled at objective {obj:.3e}")


def wcga(target, dictionary: Dictionary, m: int, p: float = 2.0, t_weak: float = 1.0,
         grid_size: int = 4096) -> GreedyTrace:
    """Weak Chebyshev greedy algorithm in L_p, p >= 2.

    Norming functionals and L_p norms use the rectangle rule on
    ``grid_size`` equispaced points; the inner best approximation is a
    damped Newton solve started from the L2 projection.
    """
    N = dictionary.N
    if not 0 <= m <= N:
        raise ValueError(f"m must lie in [0, {N}]")
    if not 2.0 <= p < math.inf:
        raise ValueError("p must be finite and >= 2")
    if not 0.0 < t_weak <= 1.0:
        raise ValueError("t_weak must lie in (0, 1]")
    if grid_size < 2 * dictionary.max_frequency * max(2, math.ceil(p)):
        raise ValueError("grid too coarse for exact quadrature")
    c, desc = _target_coeffs(target, dictionary)
    psi = dictionary.grid_values(grid_size) / dictionary.norms
    y = dictionary.grid_values(grid_size) @ c
    taken = np.zeros(N, dtype=bool)
    selected: list[int] = []
    r = y.copy()
    x = np.zeros(0)
    residuals = [_lp_obj(r, p) ** (1.0 / p)]
    for _ in range(m):
        nr = residuals[-1]
        if nr > 0:
            dual = np.abs(r) ** (p - 1.0) * np.sign(r)
            scores = np.abs(dual @ psi) / r.size / nr ** (p - 1.0)
        else:
            scores = np.zeros(N)
        j = _pick(scores, taken, t_weak)
        taken[j] = True
        selected.append(j)
        x, r = best_lp_approximation(y, psi[:, selected], p)
        residuals.append(min(_lp_obj(r, p) ** (1.0 / p), residuals[-1]))
    norms = dictionary.norms
    coeffs = tuple(float(v) for v in x / norms[selected]) if selected else ()
    return GreedyTrace(desc, "wcga", tuple(map(float, residuals)), tuple(selected),
                       t_weak=t_weak, p=p, coefficients=coeffs)


def random_a1_member(dictionary: Dictionary, rng: np.random.Generator, k: int | None = None):
    """Dense phi-coefficients of a random element of the octahedron A_1 in the psi basis.

    ``k`` terms (default: all) with a uniform draw from the l1 sphere.
    """
    N = dictionary.N
    k = N if k is None else k
    idx = rng.choice(N, size=k, replace=False)
    w = rng.exponential(size=k)
    a = np.zeros(N)
    a[idx] = rng.choice([-1.0, 1.0], size=k) * w / w.sum()
    return a / dictionary.norms


def sigma_budget_a1(m: int, p: float, v: float, R1: float) -> float:
    """``v^(1/2) sqrt(p) m^(-1/2) / R1`` with the constant set to 1."""
    if m < 1 or p < 2:
        raise ValueError("need m >= 1 and p >= 2")
    return math.sqrt(v) * math.sqrt(p) / (R1 * math.sqrt(m))


def entropy_from_sigma(k: int, N: int, r: float, C: float = 1.0) -> float:
    """``C (log2(2N/k) / k)^r``."""
    if not 1 <= k <= N:
        raise ValueError("k must lie in [1, N]")
    return C * (math.log2(2 * N / k) / k) ** r


def fit_constant(traces, bound) -> float:
    """Smallest C with ``sigma_m <= C * bound(m)`` for every m >= 1 of every trace."""
    c = 0.0
    for tr in traces:
        for m, s in enumerate(tr.residual_norms[1:], start=1):
            c = max(c, s / bound(m))
    return c


def traces_to_csv(traces) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["trace", "algorithm", "p", "step", "selected_index", "residual_norm"])
    for i, tr in enumerate(traces):
        for step, r in enumerate(tr.residual_norms):
            sel = "" if step == 0 else tr.selected_indices[step - 1]
            w.writerow([i, tr.algorithm, tr.p, step, sel, repr(float(r))])
    return buf.getvalue()
