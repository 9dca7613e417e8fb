"""Worst-case discretization ratios over all v-sparse subspaces.

For p = 2 the extreme ratio on a fixed support is an extreme generalized
eigenvalue of the pair (discrete Gram, continuous Gram), so enumerating all
supports gives exact worst cases.  For other exponents each support is
searched by projected gradient over coefficient vectors; the resulting
interval is an inner estimate of the true one.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from .errors import CombinatorialOverflow, SingularGram, ZeroFunction
from .function_space import (
    DEFAULT_GRID,
    Dictionary,
    NormSpec,
    SparseFunction,
    lacunary_function,
    lp_norm,
    make_trig_real,
    sup_norm,
)
from .sampling import as_nodes, discrete_lp

EXACT = "exact_enumeration"
HEURISTIC = "heuristic_search"


@dataclass(frozen=True)
class SearchPolicy:
    """How :func:`verify_universal` visits supports and searches coefficients.

    ``mode`` is ``"exhaustive"`` (raise if there are more than
    ``enumeration_cap`` supports), ``"auto"`` (fall back to sampling) or
    ``"sampled"``.
    """

    mode: str = "exhaustive"
    enumeration_cap: int = 10**6
    n_supports: int = 1000
    extra_supports: tuple = ()
    restarts: int = 32
    iterations: int = 200
    grid_size: int = 4096
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exhaustive", "auto", "sampled"):
            raise ValueError(f"unknown search mode {self.mode!r}")


@dataclass
class DiscretizationReport:
    p: float
    v: int
    epsilon: float
    r_min: float
    r_max: float
    passed: bool
    mode: str
    witness_min: tuple
    witness_max: tuple
    supports_checked: int
    grid_size: int = DEFAULT_GRID
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.mode == EXACT

    def witness_function(self, dictionary: Dictionary, which: str = "max") -> SparseFunction:
        support, coeffs = self.witness_max if which == "max" else self.witness_min
        return SparseFunction(dictionary, tuple(support), np.asarray(coeffs))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness_min"] = {"support": list(self.witness_min[0]),
                            "coeffs": [float(c) for c in self.witness_min[1]]}
        d["witness_max"] = {"support": list(self.witness_max[0]),
                            "coeffs": [float(c) for c in self.witness_max[1]]}
        d["certified"] = self.certified
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscretizationReport":
        d = dict(d)
        d.pop("certified", None)
        for key in ("witness_min", "witness_max"):
            w = d[key]
            d[key] = (tuple(w["support"]), tuple(w["coeffs"]))
        return cls(**d)


def _is_pass(r_min, r_max, epsilon) -> bool:
    return bool(r_min >= 1.0 - epsilon and r_max <= 1.0 + epsilon)


def _discrete_gram(nodes, dictionary: Dictionary) -> np.ndarray:
    phi = dictionary.evaluate(nodes)
    return phi.T @ phi / nodes.size


def ratio_extremes_p2(xi, dictionary: Dictionary, support):
    """Extreme values of ``||f||_{L2(xi)}^2 / ||f||_2^2`` over ``span(support)``.

    Returns ``(lam_min, lam_max, vec_min, vec_max)``; the vectors are
    coefficient vectors on ``support`` normalised to ``||f||_2 = 1``.
    """
    idx = list(support)
    nodes = as_nodes(xi)
    phi = dictionary.evaluate(nodes, idx)
    a = phi.T @ phi / nodes.size
    g = dictionary.gram[np.ix_(idx, idx)]
    try:
        w, vecs = scipy.linalg.eigh(a, g)
    except np.linalg.LinAlgError as exc:
        raise SingularGram(f"Gram submatrix on {idx} is not positive definite") from exc
    if np.linalg.eigvalsh(g)[0] <= 1e-12:
        raise SingularGram(f"Gram submatrix on {idx} is singular")
    return float(w[0]), float(w[-1]), vecs[:, 0], vecs[:, -1]


def _p2_batch(a_full, gram, supports):
    """Extreme generalized eigenvalues for a batch of supports (rows of ``supports``)."""
    ii = supports[:, :, None]
    jj = supports[:, None, :]
    a = a_full[ii, jj]
    g = gram[ii, jj]
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularGram("a Gram submatrix is not positive definite") from exc
    if np.min(np.abs(np.diagonal(chol, axis1=1, axis2=2))) <= 1e-6:
        raise SingularGram("a Gram submatrix is numerically singular")
    x = np.linalg.solve(chol, a)
    m = np.linalg.solve(chol, np.swapaxes(x, 1, 2))
    m = 0.5 * (m + np.swapaxes(m, 1, 2))
    w = np.linalg.eigvalsh(m)
    return w[:, 0], w[:, -1]


def _first_extreme(values, which):
    """Index of the first entry within rounding of the extreme (lexicographic tie-break)."""
    best = values.min() if which == "min" else values.max()
    tol = 1e-12 * max(1.0, abs(best))
    hits = np.flatnonzero(np.abs(values - best) <= tol)
    return int(hits[0])


def _abs_pow(x, p):
    ax = np.abs(x)
    if p == 1:
        return ax
    if p == 2:
        return ax * ax
    return ax**p


def _heuristic_support(phi_xi, phi_grid, p, rng, restarts, iterations):
    """Projected-gradient search of the discrete/continuous ratio on one support.

    Starts from every coordinate direction plus ``restarts`` Gaussian vectors.
    After each step the coefficients are rescaled to ``||f||_p = 1``; the
    step size grows on success and halves otherwise.
    """
    v = phi_xi.shape[1]
    starts = np.vstack([np.eye(v), rng.standard_normal((restarts, v))])
    mx, mg = phi_xi.shape[0], phi_grid.shape[0]

    def evaluate(a):
        # ratio, gradient and L_p-normalised copies of (a, gradient)
        fx = a @ phi_xi.T
        fg = a @ phi_grid.T
        d = _abs_pow(fx, p).sum(axis=1) / mx
        c = _abs_pow(fg, p).sum(axis=1) / mg
        wx = _abs_pow(fx, p - 1) * np.sign(fx)
        wg = _abs_pow(fg, p - 1) * np.sign(fg)
        gd = p * (wx @ phi_xi) / mx
        gc = p * (wg @ phi_grid) / mg
        r = d / c
        grad = (gd - r[:, None] * gc) / c[:, None]
        scale = c ** (1.0 / p)
        return r, a / scale[:, None], grad * scale[:, None]

    out = {}
    for sense in (1.0, -1.0):
        r, a, grad = evaluate(starts)
        step = np.full(a.shape[0], 0.1)
        for _ in range(iterations):
            live = step >= 1e-9
            if not np.any(live):
                break
            r_new, a_new, g_new = evaluate(a[live] + sense * step[live, None] * grad[live])
            better = np.zeros_like(live)
            better[live] = sense * (r_new - r[live]) > 0
            take = better[live]
            a[better], r[better], grad[better] = a_new[take], r_new[take], g_new[take]
            step = np.where(better, step * 1.2, np.where(live, step * 0.5, step))
        k = int(np.argmax(r) if sense > 0 else np.argmin(r))
        out[sense] = (float(r[k]), a[k].copy())
    return out[-1.0][0], out[-1.0][1], out[1.0][0], out[1.0][1]


def _visit_list(dictionary: Dictionary, v: int, policy: SearchPolicy):
    total = math.comb(dictionary.N, v)
    exhaustive = policy.mode == "exhaustive" or (
        policy.mode == "auto" and total <= policy.enumeration_cap
    )
    if exhaustive and total > policy.enumeration_cap:
        raise CombinatorialOverflow(
            f"C({dictionary.N},{v}) = {total} exceeds cap {policy.enumeration_cap}"
        )
    if exhaustive:
        supports = np.array(list(itertools.combinations(range(dictionary.N), v)), dtype=int)
        supports = supports.reshape(-1, v)
        complete = True
    else:
        rng = np.random.default_rng(policy.seed)
        chosen = set()
        budget = min(policy.n_supports, total)
        while len(chosen) < budget:
            chosen.add(tuple(sorted(rng.choice(dictionary.N, v, replace=False).tolist())))
        complete = budget == total
        supports = np.array(sorted(chosen), dtype=int).reshape(-1, v)
    if policy.extra_supports:
        extra = [tuple(sorted(s)) for s in policy.extra_supports if len(s) == v]
        merged = sorted(set(map(tuple, supports.tolist())) | set(extra))
        supports = np.array(merged, dtype=int).reshape(-1, v)
    return supports, complete


def verify_universal(xi, dictionary: Dictionary, v: int, p: float, epsilon: float,
                     search: SearchPolicy | None = None) -> DiscretizationReport:
    """Worst-case ratios of ``(1/m) sum |f(xi_j)|^p / ||f||_p^p`` over ``Sigma_v``.

    Exact (``mode == "exact_enumeration"``) only for p = 2 with all supports
    visited.  Otherwise ``r_max`` is a lower bound on the true maximum and
    ``r_min`` an upper bound on the true minimum.
    """
    policy = search or SearchPolicy()
    if not 1 <= v <= dictionary.N:
        raise ValueError(f"v must lie in [1, {dictionary.N}]")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    nodes = as_nodes(xi)
    supports, complete = _visit_list(dictionary, v, policy)

    if p == 2:
        a_full = _discrete_gram(nodes, dictionary)
        gram = np.asarray(dictionary.gram)
        lo = np.empty(len(supports))
        hi = np.empty(len(supports))
        chunk = 20000
        for s in range(0, len(supports), chunk):
            lo[s:s + chunk], hi[s:s + chunk] = _p2_batch(a_full, gram, supports[s:s + chunk])
        kmin, kmax = _first_extreme(lo, "min"), _first_extreme(hi, "max")
        _, _, vmin, _ = ratio_extremes_p2(nodes, dictionary, supports[kmin])
        _, _, _, vmax = ratio_extremes_p2(nodes, dictionary, supports[kmax])
        r_min, r_max = float(lo[kmin]), float(hi[kmax])
        wmin = (tuple(int(i) for i in supports[kmin]), tuple(float(c) for c in vmin))
        wmax = (tuple(int(i) for i in supports[kmax]), tuple(float(c) for c in vmax))
        mode = EXACT if complete else HEURISTIC
        grid_size = DEFAULT_GRID
        note = "" if complete else "sampled supports: r_max is a lower bound, r_min an upper bound"
    else:
        NormSpec(p, policy.grid_size).check_resolution(dictionary)
        rng = np.random.default_rng(policy.seed)
        phi_xi_all = dictionary.evaluate(nodes)
        phi_grid_all = dictionary.grid_values(policy.grid_size)
        r_min, r_max = math.inf, -math.inf
        wmin = wmax = ((), ())
        for s in supports:
            idx = list(s)
            lo, amin, hi, amax = _heuristic_support(
                phi_xi_all[:, idx], phi_grid_all[:, idx], p, rng,
                policy.restarts, policy.iterations,
            )
            if not wmin[0] or lo < r_min - 1e-12 * max(1.0, abs(r_min)):
                r_min, wmin = lo, (tuple(int(i) for i in s), tuple(float(c) for c in amin))
            if not wmax[0] or hi > r_max + 1e-12 * max(1.0, abs(r_max)):
                r_max, wmax = hi, (tuple(int(i) for i in s), tuple(float(c) for c in amax))
        mode = HEURISTIC
        grid_size = policy.grid_size
        note = "heuristic search: r_max is a lower bound, r_min an upper bound"

    return DiscretizationReport(
        p=float(p), v=int(v), epsilon=float(epsilon),
        r_min=float(r_min), r_max=float(r_max),
        passed=_is_pass(r_min, r_max, epsilon), mode=mode,
        witness_min=wmin, witness_max=wmax,
        supports_checked=int(len(supports)), grid_size=int(grid_size), note=note,
    )


def witness_ratio(report: DiscretizationReport, xi, dictionary: Dictionary, which="max") -> float:
    """Re-evaluate a witness ratio from scratch."""
    f = report.witness_function(dictionary, which)
    spec = NormSpec(report.p, report.grid_size)
    return discrete_lp(f, xi, report.p) ** report.p / lp_norm(f, spec) ** report.p


def check_instance(f: SparseFunction, xi, p: float, epsilon: float,
                   grid_size: int = DEFAULT_GRID) -> bool:
    """Whether ``(1-eps)||f||_p^p <= (1/m) sum |f(xi_j)|^p <= (1+eps)||f||_p^p``."""
    norm = lp_norm(f, NormSpec(p, grid_size))
    if norm <= 1e-14 * max(1.0, float(np.abs(f.coeffs).sum())):
        raise ZeroFunction("||f||_p vanishes")
    ratio = (discrete_lp(f, xi, p) / norm) ** p
    return _is_pass(ratio, ratio, epsilon)


def nikolskii_counterexample(v: int, p: float, dictionary: Dictionary | None = None,
                             grid_size: int = DEFAULT_GRID):
    """``(grid sup of f / ||f||_p, v^(1/p))`` for the lacunary sum of v cosines.

    The first entry is a certified lower bound on ``||f||_inf / ||f||_p``
    (up to quadrature error in ``||f||_p``).  p = 2 is accepted as the
    limiting case.
    """
    if not 2.0 <= p < math.inf:
        raise ValueError("p must lie in [2, inf)")
    if dictionary is None:
        dictionary = make_trig_real(2**v)
    f = lacunary_function(v, dictionary)
    lower, _ = sup_norm(f, grid_size)
    return lower / lp_norm(f, NormSpec(p, grid_size)), v ** (1.0 / p)
