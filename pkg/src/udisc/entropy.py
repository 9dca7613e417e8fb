"""Covering and packing estimates for sparse unit balls, and entropy budgets.

The class ``Sigma_v^p`` is the union over supports ``G`` (``|G| = v``) of
``{f in span(G) : ||f||_p <= 1}``.  At desk scale its sup-metric covering
numbers can be bracketed:

* :func:`covering_upper` discretizes coefficients on a ``delta``-grid and
  greedily covers the grid with sup balls whose radius is shrunk by the
  grid-to-class distortion.  Distances use the certified upper side of the
  sup bracket, so the count is a valid upper bound on ``N_t``.
* :func:`packing_lower` greedily grows a set whose pairwise sup distances
  exceed ``2t`` (certified lower side), which is a lower bound on ``N_t``.

Counts are reported in bits (``log2``).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import GridOverflow, NonterminatingSum
from .function_space import Dictionary, NormSpec, _base_grid, base_frequencies

GRID_CAP = 10**7
PAIR_CAP = 4 * 10**8
SUP_GRID = 1024


@dataclass(frozen=True, eq=False)
class ClassSpec:
    """``Sigma_v^p`` over ``dictionary``; ``grid_size`` drives p != 2 norms."""

    dictionary: Dictionary
    v: int
    p: float = 2.0
    grid_size: int = 4096
    sup_grid: int = SUP_GRID

    def __post_init__(self):
        if not 1 <= self.v <= self.dictionary.N:
            raise ValueError("v must lie in [1, N]")
        if not 1.0 <= self.p < math.inf:
            raise ValueError("p must lie in [1, inf)")

    def supports(self):
        return itertools.combinations(range(self.dictionary.N), self.v)

    def coefficient_radius(self, support) -> float:
        """Certified bound on ``|a|_2`` for members supported on ``support``."""
        g = self.dictionary.gram[np.ix_(support, support)]
        r1 = math.sqrt(np.linalg.eigvalsh(g)[0])
        l2 = 1.0 if self.p >= 2 else (math.sqrt(len(support)) / r1) ** ((2 - self.p) / self.p)
        return l2 / r1

    def radius(self) -> float:
        """Certified bound on ``sup ||f||_inf`` over the class."""
        return max(math.sqrt(self.v) * self.coefficient_radius(list(s)) for s in self.supports())

    def norms(self, support, coeffs) -> np.ndarray:
        """``||f||_p`` for each row of ``coeffs`` on ``support``."""
        d = self.dictionary
        if self.p == 2:
            g = d.gram[np.ix_(support, support)]
            return np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", coeffs, g, coeffs), 0.0))
        NormSpec(self.p, self.grid_size).check_resolution(d)
        vals = coeffs @ d.grid_values(self.grid_size, support).T
        return np.mean(np.abs(vals) ** self.p, axis=1) ** (1.0 / self.p)

    def describe(self) -> dict:
        return {"N": self.dictionary.N, "v": self.v, "p": self.p,
                "kind": self.dictionary.kind}


@dataclass
class EntropyEstimate:
    epsilon: float
    lower_bits: float | None = None
    upper_bits: float | None = None
    count_lower: int | None = None
    count_upper: int | None = None
    metric: str = "sup"
    class_spec: dict = field(default_factory=dict)
    discretization_delta: float = 0.0
    slack: float = 0.0

    def row(self) -> dict:
        d = asdict(self)
        cls = d.pop("class_spec")
        d.update({f"class_{k}": v for k, v in cls.items()})
        return d


def estimates_to_csv(estimates) -> str:
    rows = [e.row() for e in estimates]
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


class _Functions:
    """Dense coefficient vectors with sup-grid values, for bracketed sup distances."""

    def __init__(self, dictionary: Dictionary, dense: np.ndarray, sup_grid: int):
        self.dense = dense
        base = dense @ dictionary.mixing
        self.base = base
        self.values = base @ _base_grid(dictionary.max_frequency, sup_grid).T
        self.freqs = base_frequencies(dictionary.max_frequency)
        self.h = 1.0 / sup_grid

    def sup_bracket_pairs(self, rows, other: "_Functions", cols):
        """Lower and upper sup distances for the pairs ``(rows[i], cols[i])``."""
        lower = np.max(np.abs(self.values[rows] - other.values[cols]), axis=1)
        db = np.abs(self.base[rows] - other.base[cols])
        lip = 2.0 * np.pi * (db @ self.freqs)
        upper = np.minimum(lower + lip * self.h / 2.0, db.sum(axis=1))
        return lower, np.maximum(upper, lower)

    def l2_distance(self, gram, rows, other: "_Functions", cols):
        diff = self.dense[rows][:, None, :] - other.dense[cols][None, :, :]
        return np.sqrt(np.maximum(np.einsum("abi,ij,abj->ab", diff, gram, diff), 0.0))


def _lattice(spec: ClassSpec, delta: float, distortion: float):
    """Grid points of the class expanded by ``distortion`` and the subset inside the class."""
    d = spec.dictionary
    outer, inner = {}, {}
    total = 0
    for support in spec.supports():
        support = list(support)
        kmax = int(math.ceil(spec.coefficient_radius(support) / delta)) + 1
        total += (2 * kmax + 1) ** spec.v
        if total > GRID_CAP:
            raise GridOverflow(f"more than {GRID_CAP} grid points at delta={delta}")
        ks = np.array(list(itertools.product(range(-kmax, kmax + 1), repeat=spec.v)), dtype=float)
        coeffs = ks * delta
        norms = spec.norms(support, coeffs)
        for k, c, nrm in zip(ks, coeffs, norms):
            if nrm > 1.0 + distortion:
                continue
            dense = np.zeros(d.N)
            dense[support] = c
            key = tuple(np.rint(dense / delta).astype(int))
            outer.setdefault(key, dense)
            if nrm <= 1.0:
                inner.setdefault(key, dense)
    keys = sorted(outer)
    outer_arr = np.array([outer[k] for k in keys])
    inner_keys = sorted(inner)
    inner_arr = np.array([inner[k] for k in inner_keys]).reshape(-1, d.N)
    return outer_arr, inner_arr


def _default_delta(spec: ClassSpec, t: float, per_delta: float, budget: int = 4000) -> float:
    """Distortion t/4, halved while the grid stays under ``budget`` points (down to t/32)."""
    rad = max(spec.coefficient_radius(list(s)) for s in spec.supports())
    n_supports = math.comb(spec.dictionary.N, spec.v)
    delta = t / (4.0 * per_delta)
    while per_delta * delta > t / 32.0:
        finer = delta / 2.0
        size = n_supports * (2 * math.ceil(rad / finer) + 3) ** spec.v
        if size > budget:
            break
        delta = finer
    return delta


def covering_upper(spec: ClassSpec, t: float, delta: float | None = None,
                   metric: str = "sup") -> EntropyEstimate:
    """Upper bound on the covering number ``N_t`` of the class.

    ``delta`` defaults to the finest coefficient spacing whose
    grid-to-class distortion lies between ``t/32`` and ``t/4`` while the
    grid stays small.  Requires ``t >= 4 * distortion``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if metric not in ("sup", "l2"):
        raise ValueError("metric must be 'sup' or 'l2'")
    d = spec.dictionary
    # distortion per unit delta: half-cell corner measured in the metric
    per_delta = spec.v / 2.0 if metric == "sup" else d.riesz_upper * math.sqrt(spec.v) / 2.0
    if delta is None:
        delta = _default_delta(spec, t, per_delta)
    distortion = per_delta * delta
    if t < 4.0 * distortion:
        raise ValueError(f"t={t} below 4 x grid distortion {distortion}")
    radius_class = spec.radius() if metric == "sup" else _l2_radius(spec)
    base = EntropyEstimate(epsilon=t, metric=metric, class_spec=spec.describe(),
                           discretization_delta=delta, slack=distortion)
    if t >= radius_class:
        base.count_upper, base.upper_bits = 1, 0.0
        return base

    # p-norm inflation of a half-cell corner is at most its sup norm
    outer, inner = _lattice(spec, delta, spec.v * delta / 2.0)
    if outer.shape[0] * inner.shape[0] > PAIR_CAP:
        raise GridOverflow(f"{outer.shape[0]} x {inner.shape[0]} distance pairs")
    pts = _Functions(d, outer, spec.sup_grid)
    ctr = _Functions(d, inner, spec.sup_grid)
    r = t - distortion
    cover = np.zeros((inner.shape[0], outer.shape[0]), dtype=bool)
    gram = np.asarray(d.gram)
    cols = np.arange(outer.shape[0])
    chunk = max(1, 200_000 // max(1, outer.shape[0]))
    for s in range(0, inner.shape[0], chunk):
        rows = np.arange(s, min(s + chunk, inner.shape[0]))
        l2 = ctr.l2_distance(gram, rows, pts, cols)
        if metric == "l2":
            cover[rows] = l2 <= r
            continue
        # ||g||_2 <= ||g||_inf on a probability space: prune before the grid pass
        ri, ci = np.nonzero(l2 <= r)
        for b in range(0, ri.size, 20000):
            pr, pc = rows[ri[b:b + 20000]], ci[b:b + 20000]
            _, up = ctr.sup_bracket_pairs(pr, pts, pc)
            cover[pr, pc] = up <= r

    uncovered = np.ones(outer.shape[0], dtype=bool)
    if not np.all(cover.any(axis=0)):
        raise GridOverflow("grid too coarse: some grid points have no admissible center")
    count = 0
    while uncovered.any():
        gains = cover[:, uncovered].sum(axis=1)
        k = int(np.argmax(gains))
        uncovered &= ~cover[k]
        count += 1
    base.count_upper, base.upper_bits = count, math.log2(count)
    return base


def _l2_radius(spec: ClassSpec) -> float:
    if spec.p >= 2:
        return 1.0
    return max(spec.coefficient_radius(list(s)) * spec.dictionary.riesz_upper
               for s in spec.supports())


def _boundary(spec: ClassSpec, support, directions):
    """Scale each direction onto the unit sphere ``||f||_p = 1``."""
    norms = spec.norms(list(support), directions)
    return directions / norms[:, None]


def packing_lower(spec: ClassSpec, t: float, trials: int = 500, seed: int = 0) -> EntropyEstimate:
    """Lower bound on ``N_t`` from a greedily built set with pairwise sup distance ``> 2t``.

    Candidates come in a fixed order: for every support, the boundary points
    ``+-u`` along each coordinate direction ``u``, then the origin, then
    multiples of those directions spaced by ``2t`` in sup norm, then
    ``trials`` random class members.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    d = spec.dictionary
    rng = np.random.default_rng(seed)
    firsts, middles = [], []
    for support in spec.supports():
        support = list(support)
        u = _boundary(spec, support, np.eye(spec.v))
        for row in u:
            dense = np.zeros(d.N)
            dense[support] = row
            firsts += [dense, -dense]
            height = np.max(np.abs(dense @ d.grid_values(spec.sup_grid).T))
            if height > 0:
                n = int(math.floor(height / (2 * t)))
                for k in range(1, n + 1):
                    lam = 1.0 - k * 2.0 * t * 1.000001 / height
                    middles += [lam * dense, -lam * dense]
    heights = [np.max(np.abs(f @ d.grid_values(spec.sup_grid).T)) for f in firsts]
    firsts = [firsts[i] for i in np.argsort(-np.array(heights), kind="stable")]
    cand = firsts + [np.zeros(d.N)] + middles
    supports = list(spec.supports())
    for _ in range(trials):
        support = list(supports[rng.integers(len(supports))])
        u = _boundary(spec, support, rng.standard_normal((1, spec.v)))[0]
        dense = np.zeros(d.N)
        dense[support] = rng.uniform(-1.0, 1.0) * u
        cand.append(dense)

    funcs = _Functions(d, np.array(cand), spec.sup_grid)
    kept = []
    for i in range(len(cand)):
        if kept:
            gaps = np.max(np.abs(funcs.values[kept] - funcs.values[i]), axis=1)
            if np.min(gaps) <= 2.0 * t:
                continue
        kept.append(i)
    count = len(kept)
    return EntropyEstimate(epsilon=t, lower_bits=math.log2(count), count_lower=count,
                           class_spec=spec.describe())


def estimate(spec: ClassSpec, t: float, delta: float | None = None, trials: int = 500,
             seed: int = 0) -> EntropyEstimate:
    """Both sides of the bracket at scale ``t``."""
    up = covering_upper(spec, t, delta)
    lo = packing_lower(spec, t, trials, seed)
    up.lower_bits, up.count_lower = lo.lower_bits, lo.count_lower
    return up


def entropy_budget_p2(k: int, v: int, N: int, C: float = 1.0) -> float:
    """``C log2(2N) (v/k)^(1/2)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return C * math.log2(2 * N) * math.sqrt(v / k)


def entropy_budget_p(k: int, v: int, N: int, p: float, C: float = 1.0) -> float:
    """``C log2(2N)^(2/p) (v/k)^(1/p)`` for ``1 <= p <= 2``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 1.0 <= p <= 2.0:
        raise ValueError("p must lie in [1, 2]")
    return C * math.log2(2 * N) ** (2.0 / p) * (v / k) ** (1.0 / p)


@dataclass(frozen=True)
class TransferParams:
    """Exponents for passing from the p-ball to the 2-ball (``2 < q <= inf``)."""

    p: float
    q: float = math.inf

    def __post_init__(self):
        if not 1.0 <= self.p < 2.0:
            raise ValueError("p must lie in [1, 2)")
        if not self.q > 2.0:
            raise ValueError("q must exceed 2")

    @property
    def theta(self) -> float:
        inv_q = 0.0 if math.isinf(self.q) else 1.0 / self.q
        return (0.5 - inv_q) / (1.0 / self.p - inv_q)

    @property
    def a(self) -> float:
        th = self.theta
        return 2.0 ** (th / (1.0 - th))


def transfer_scales(epsilon: float, params: TransferParams, class_radius: float):
    """Scales ``2^-3 a^(s-1) eps^theta`` for s = 0, 1, ... below ``2 * class_radius``."""
    a, th = params.a, params.theta
    if a <= 1.0:
        raise NonterminatingSum("growth factor a must exceed 1")
    scales = []
    s = 0
    while True:
        arg = 2.0**-3 * a ** (s - 1) * epsilon**th
        if arg >= 2.0 * class_radius:
            return scales
        scales.append(arg)
        s += 1


def transfer_rhs(epsilon: float, params: TransferParams, H, class_radius: float) -> float:
    """Right-hand side of the transfer inequality for sup-metric entropy, in bits.

    ``H(t)`` must vanish for ``t >= 2 * class_radius``; the infinite sum is
    truncated there.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if H(2.0 * class_radius) != 0:
        raise NonterminatingSum("H does not vanish at twice the class radius")
    total = sum(H(t) for t in transfer_scales(epsilon, params, class_radius))
    return float(total + H(epsilon ** params.theta))


def entropy_lower_log(t: float, R: float) -> float:
    """``log2(R / (4t))``; negative values are left for the caller to clamp."""
    if not 0 < t < R:
        raise ValueError("need 0 < t < R")
    return math.log2(R / (4.0 * t))


def empirical_nikolskii_log(dictionary: Dictionary, nodes, n_samples: int = 200,
                            seed: int = 0) -> float:
    """Largest observed ``||f||_{L_inf(nodes)} / ||f||_{L_{log N}(nodes)}`` over random f.

    A measured stand-in for the constant relating the sup norm to the
    ``L_{log N}`` norm on a discrete set.
    """
    q = max(1.0, math.log(dictionary.N))
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((n_samples, dictionary.N)) @ dictionary.evaluate(np.asarray(nodes)).T
    sup = np.max(np.abs(vals), axis=1)
    lq = np.mean(np.abs(vals) ** q, axis=1) ** (1.0 / q)
    return float(np.max(sup / lq))
