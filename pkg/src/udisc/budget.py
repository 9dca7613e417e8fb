"""Sample-size budgets: the Chernoff union condition, the level partition
``h(f, x)``, its accuracy schedule, the entropy integral and closed-form
budgets from the literature.

Logs paired with ``exp`` are natural; displayed budget formulas use log2.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special

from .errors import NetDeficient, QuadratureFailure
from .function_space import Dictionary, SparseFunction, base_eval


# --- Chernoff union condition -------------------------------------------------


@dataclass(frozen=True)
class ChernoffLevel:
    """One level: ``card`` functions with sup bound ``M`` and tolerance ``eta``.

    Huge cardinalities can be passed as ``log_card`` (natural log) instead.
    """

    M: float
    eta: float
    card: float | None = None
    log_card: float | None = None

    def __post_init__(self):
        if (self.card is None) == (self.log_card is None):
            raise ValueError("give exactly one of card and log_card")
        if self.card is not None:
            if self.card < 1:
                raise ValueError("card must be >= 1")
            object.__setattr__(self, "log_card", math.log(self.card))
        elif self.log_card < 0:
            raise ValueError("log_card must be >= 0")
        if self.M <= 0:
            raise ValueError("M must be positive")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")


@dataclass(frozen=True)
class ChernoffFamily:
    levels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))


def bl2_condition(fam: ChernoffFamily, m: int) -> tuple[float, bool]:
    """``2 sum_j |F_j| exp(-m eta_j^2 / (8 M_j))`` and whether it is below 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not fam.levels:
        return 0.0, True
    expo = np.array([math.log(2.0) + lv.log_card - m * lv.eta**2 / (8.0 * lv.M)
                     for lv in fam.levels])
    lhs = float(np.exp(scipy.special.logsumexp(expo)))
    return lhs, lhs < 1.0


# --- level partition -----------------------------------------------------------


@dataclass(frozen=True)
class Level:
    j: int
    M: float
    log_L: float
    eps: float | None = None


@dataclass(frozen=True)
class PartitionSchedule:
    """Geometric levels ``(1+a)^j``, ``j0 < j <= J``, with ``a = c_star * epsilon``.

    ``levels[i].log_L`` is the natural log of the product of net sizes from
    level j up to J.
    """

    epsilon: float
    p: float
    R: float
    c_star: float
    lam: float
    j0: int
    J: int
    levels: tuple = field(default=(), repr=False)

    @property
    def a(self) -> float:
        return self.c_star * self.epsilon

    def level_values(self) -> np.ndarray:
        return (1.0 + self.a) ** np.arange(self.j0 + 1, self.J + 1, dtype=float)


def level_bounds(epsilon: float, p: float, R: float, c_star: float = 0.01) -> tuple[int, int]:
    """Integers ``(j0, J)`` with ``(1+a)^(J-1) <= R < (1+a)^J`` and
    ``(1+a)^(j0 p) <= epsilon/5 <= (1+a)^((j0+1) p)``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if R < 1.0:
        raise ValueError("R must be >= 1")
    if not 0.0 < c_star < 0.5:
        raise ValueError("c_star must lie in (0, 1/2)")
    la = math.log1p(c_star * epsilon)
    J = math.floor(math.log(R) / la) + 1
    while (1 + c_star * epsilon) ** J <= R:
        J += 1
    while (1 + c_star * epsilon) ** (J - 1) > R:
        J -= 1
    j0 = math.floor(math.log(epsilon / 5.0) / (p * la))
    while (1 + c_star * epsilon) ** ((j0 + 1) * p) < epsilon / 5.0:
        j0 += 1
    while (1 + c_star * epsilon) ** (j0 * p) > epsilon / 5.0:
        j0 -= 1
    return j0, J


def make_partition_schedule(epsilon: float, p: float, R: float, log_net_size,
                            c_star: float = 0.01, lam: float = 8.0) -> PartitionSchedule:
    """Levels with ``M_j = (1+a)^(pj)`` and ``log L_j = sum_{k>=j} log|A_k|``.

    ``log_net_size(j)`` is the natural log of the size of an
    ``a(1+a)^j``-net of the class.
    """
    if lam <= 1.0:
        raise ValueError("lam must exceed 1")
    j0, J = level_bounds(epsilon, p, R, c_star)
    a = c_star * epsilon
    js = np.arange(J, j0, -1)
    sizes = np.array([float(log_net_size(int(j))) for j in js])
    log_L = np.cumsum(sizes)[::-1]
    levels = tuple(Level(int(j), (1.0 + a) ** (p * j), float(ll))
                   for j, ll in zip(js[::-1], log_L))
    return PartitionSchedule(epsilon, p, R, c_star, lam, j0, J, levels)


def epsilon_schedule(levels, lam: float, m: int):
    """``eps_j = 4 sqrt(M_j) sqrt(log(lam L_j)) / sqrt(m)``; returns ``(eps, total)``.

    ``levels`` is a sequence of :class:`Level` or ``(M, L)`` pairs.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    M = np.array([lv.M if isinstance(lv, Level) else lv[0] for lv in levels], dtype=float)
    log_lam_L = np.array([math.log(lam) + (lv.log_L if isinstance(lv, Level) else math.log(lv[1]))
                          for lv in levels], dtype=float)
    if np.any(log_lam_L <= 0):
        raise ValueError("lam * L_j must exceed 1")
    eps = 4.0 * np.sqrt(M) * np.sqrt(log_lam_L) / math.sqrt(m)
    return eps, float(eps.sum())


def schedule_at(schedule: PartitionSchedule, m: int) -> PartitionSchedule:
    eps, _ = epsilon_schedule(schedule.levels, schedule.lam, m)
    levels = tuple(Level(lv.j, lv.M, lv.log_L, float(e)) for lv, e in zip(schedule.levels, eps))
    return PartitionSchedule(schedule.epsilon, schedule.p, schedule.R, schedule.c_star,
                             schedule.lam, schedule.j0, schedule.J, levels)


def schedule_family(schedule: PartitionSchedule) -> ChernoffFamily:
    """The level families ``F_j`` with ``|F_j| <= L_j`` and ``eta_j = eps_j``."""
    if any(lv.eps is None for lv in schedule.levels):
        raise ValueError("schedule has no accuracies; use schedule_at first")
    return ChernoffFamily(tuple(ChernoffLevel(M=lv.M, eta=min(lv.eps, 1 - 1e-16),
                                              log_card=lv.log_L)
                                for lv in schedule.levels))


def schedule_constant(c_star: float = 0.01) -> float:
    """Multiplier ``C_p`` for :func:`required_m_integral` (with ``c_p = c_star``)
    under which the level schedule is feasible on small lattice-net classes.

    Summing the levels turns the integral into the schedule up to
    ``16 ln 2 / log(1+a)^3 ~ 16 ln 2 / (c_star eps)^3``; the extra factor 32
    covers the ``log lam`` terms and the level discretization, as measured.
    """
    return 512.0 * math.log(2.0) / c_star**3


def feasible_m(schedule: PartitionSchedule) -> int:
    """Smallest m with ``sum_j eps_j <= epsilon / 4``."""
    _, s1 = epsilon_schedule(schedule.levels, schedule.lam, 1)
    m = max(1, math.ceil((4.0 * s1 / schedule.epsilon) ** 2))
    while epsilon_schedule(schedule.levels, schedule.lam, m)[1] > schedule.epsilon / 4:
        m += 1
    return m


@dataclass(frozen=True)
class LatticeNet:
    """Nets of a v-sparse class built by rounding coefficients to a lattice.

    At radius ``r`` the spacing is ``2 r / (v * B)`` with ``B`` the largest
    sup norm bound of a dictionary element, so rounding moves a function by
    at most ``r`` in sup norm.  Sizes count every lattice point in the
    coefficient box of radius ``coef_radius`` over all supports.
    """

    dictionary: Dictionary
    v: int
    coef_radius: float

    @property
    def element_bound(self) -> float:
        return float(np.max(np.abs(self.dictionary.mixing).sum(axis=1)))

    def spacing(self, r: float) -> float:
        return 2.0 * r / (self.v * self.element_bound)

    def approximate(self, f: SparseFunction, r: float) -> np.ndarray:
        s = self.spacing(r)
        return s * np.round(f.coeffs / s)

    def log_size(self, r: float) -> float:
        """Natural log of the net size at radius r."""
        if r >= self.v * self.element_bound * self.coef_radius:
            return 0.0
        per = 2.0 * math.floor(self.coef_radius / self.spacing(r)) + 1.0
        n_supp = math.comb(self.dictionary.N, self.v)
        return math.log(n_supp) + self.v * math.log(per)

    def entropy_bits(self, t: float) -> float:
        return self.log_size(t) / math.log(2.0)


def net_partition(f: SparseFunction, net: LatticeNet, schedule: PartitionSchedule,
                  p: float, grid) -> tuple[np.ndarray, np.ndarray]:
    """Values ``h(f, x)`` on ``grid`` and the level ``j`` of each grid point.

    Level ``j0`` marks the complement of all ``U_j``.  Each net approximant is
    checked against the certified sup distance before use.
    """
    grid = np.asarray(grid, dtype=float)
    a = schedule.a
    js = np.arange(schedule.j0 + 1, schedule.J + 1)
    radii = a * (1.0 + a) ** js.astype(float)
    level = np.full(grid.shape, schedule.j0, dtype=int)
    if not f.support:
        return np.zeros(grid.shape), level
    d = f.dictionary
    sub = d.mixing[list(f.support)]
    phi = base_eval(grid, d.max_frequency) @ sub.T
    for j, r in zip(js, radii):
        q = net.approximate(f, r)
        db = np.abs((f.coeffs - q) @ sub)
        # certified sup distance: l1 cap of base coefficients
        if db.sum() > r * (1 + 1e-12):
            raise NetDeficient(f"level {j}: net element at sup distance {db.sum():.3e} > {r:.3e}")
        vals = np.abs(phi @ q)
        level[vals >= (1.0 + a) ** (j - 1)] = j
    h = np.where(level > schedule.j0, (1.0 + a) ** level.astype(float), 0.0)
    return h, level


# --- entropy integral ----------------------------------------------------------


def _integral_on_grid(H, c: float, lo: float, R: float, p: float, n: int) -> float:
    s = np.linspace(math.log(lo), math.log(R), n + 1)
    t = np.exp(s)
    hv = np.array([H(c * ti) for ti in t], dtype=float)
    if np.any(hv < 0) or not np.all(np.isfinite(hv)):
        raise QuadratureFailure("entropy function returned a negative or non-finite value")
    ds = s[1] - s[0]
    # inner(u) = int_u^R H(c t) dt / t, accumulated from the top
    seg = 0.5 * (hv[1:] + hv[:-1]) * ds
    inner = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    outer = np.exp(s * p / 2.0) * np.sqrt(inner)
    return float(np.sum(0.5 * (outer[1:] + outer[:-1])) * ds)


def required_m_integral(p: float, epsilon: float, R: float, H, c_p: float = 1.0,
                        C_p: float = 1.0, rtol: float = 1e-6, max_points: int = 2**22) -> int:
    """``ceil(C_p eps^-5 (int_{eps^(1/p)/10}^R u^(p/2-1) (int_u^R H(c_p eps t)/t dt)^(1/2) du)^2)``.

    ``H(t)`` is a covering entropy in bits.  Both integrals are taken in the
    log variable by the trapezoid rule on a common grid, doubled until two
    successive values agree to ``rtol``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if p < 1:
        raise ValueError("p must be >= 1")
    lo = 0.1 * epsilon ** (1.0 / p)
    if lo >= R:
        return 0
    c = c_p * epsilon
    n = 256
    prev = _integral_on_grid(H, c, lo, R, p, n)
    while True:
        n *= 2
        if n > max_points:
            raise QuadratureFailure(f"no convergence to rtol={rtol} within {max_points} points")
        cur = _integral_on_grid(H, c, lo, R, p, n)
        if abs(cur - prev) <= rtol * abs(cur) or cur == prev == 0.0:
            break
        prev = cur
    return math.ceil(C_p * epsilon**-5 * cur**2)


def budget_shape(epsilon: float, v: float, q: float, B1: float = 1.0, B2: float = 1.0) -> float:
    """``eps^(-5-q) v B1^q (log2(B2 v / eps))^2``."""
    return epsilon ** (-5.0 - q) * v * B1**q * math.log2(B2 * v / epsilon) ** 2


# --- closed-form budgets ---------------------------------------------------------


def required_m_lemma41(N: int, p: float, beta: float, K: float, epsilon: float,
                       C_beta: float = 1.0) -> int:
    """``ceil(C_beta K^beta eps^-2 log2(2/eps) N^(beta+1) log2 N)``."""
    if K < 2 or beta <= 0 or not 0.0 < epsilon <= 0.5 or N < 1 or p < 1:
        raise ValueError("need K >= 2, beta > 0, 0 < epsilon <= 1/2, N >= 1, p >= 1")
    val = (C_beta * K**beta * epsilon**-2 * math.log2(2.0 / epsilon)
           * N ** (beta + 1) * math.log2(N))
    return math.ceil(val - 1e-9 * val)


@dataclass(frozen=True)
class BudgetParams:
    B: float = 1.0
    B1: float = 1.0
    B2: float = 1.0
    K: float = 2.0
    beta: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if min(self.B, self.B1, self.B2) < 1:
            raise ValueError("B, B1, B2 must be >= 1")
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def compare_budgets(v: int, N: int, p: float, n_hc: int, d: int = 1) -> dict:
    """Unit-constant budgets of the older and newer universal discretization bounds.

    ``n_hc`` is the hyperbolic-cross parameter of the older bounds and ``d``
    its dimension, recorded for reference.
    """
    if min(v, N, n_hc, d) < 1 or p < 1:
        raise ValueError("all arguments must be >= 1")
    L = math.log2(2 * N)
    rec = {
        "v": v, "N": N, "p": p, "n_hc": n_hc, "d": d,
        "old_p1": v**2 * n_hc**4.5,
        "old_p2": v**2 * n_hc,
        "new": v * L**2 * math.log2(2 * v) ** 2,
        "p_gt2": v ** (p / 2.0) * L**2 if p > 2 else None,
    }
    return rec


BUDGET_COLUMNS = ["v", "N", "p", "n_hc", "d", "old_p1", "old_p2", "new", "p_gt2"]


def budgets_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(BUDGET_COLUMNS)
    for r in records:
        w.writerow(["" if r[k] is None else (repr(r[k]) if isinstance(r[k], float) else r[k])
                    for k in BUDGET_COLUMNS])
    return buf.getvalue()


# --- Monte Carlo check of the union bound -----------------------------------------


@dataclass(frozen=True)
class IndicatorMember:
    """``M * 1{|g(x)| >= tau}`` for a sparse trig function g."""

    base_coeffs: np.ndarray
    max_frequency: int
    tau: float
    M: float
    l1: float

    def __call__(self, x):
        g = base_eval(np.asarray(x, dtype=float), self.max_frequency) @ self.base_coeffs
        return self.M * (np.abs(g) >= self.tau)


def indicator_family(dictionary: Dictionary, Ms, card: int, v: int, seed: int,
                     grid_size: int = 2**16):
    """Levels of ``card`` indicator functions each, one level per sup bound in ``Ms``.

    Each member has ``||f||_1 <= 1``; L1 norms are measured on a fine grid.
    """
    from .function_space import random_sparse, grid_values

    rng = np.random.default_rng(seed)
    levels = []
    for M in Ms:
        members = []
        for _ in range(card):
            g = random_sparse(dictionary, v, rng)
            vals = np.abs(grid_values(g, grid_size))
            target = rng.uniform(0.3, 1.0) / M
            tau = float(np.quantile(vals, 1.0 - target))
            mu = float(np.mean(vals >= tau))
            members.append(IndicatorMember(g.base_coeffs, dictionary.max_frequency,
                                           tau, float(M), float(M) * mu))
        levels.append(members)
    return levels


def bl2_monte_carlo(levels, etas, m: int, seeds) -> float:
    """Fraction of seeded iid point sets meeting every level tolerance at once."""
    ok = 0
    seeds = list(seeds)
    for s in seeds:
        x = np.random.default_rng(s).random(m)
        good = all(abs(f.l1 - float(np.mean(f(x)))) <= eta
                   for members, eta in zip(levels, etas) for f in members)
        ok += good
    return ok / len(seeds)
