"""Dictionaries on the unit interval, sparse functions over them, and their norms.

Every dictionary here is a real trigonometric system, possibly mixed by a fixed
matrix.  Element ``j`` is ``phi_j = sum_k mixing[j, k] * psi_k`` where ``psi``
is the base system ``1, cos(2 pi x), sin(2 pi x), cos(4 pi x), ...`` on
``[0, 1)`` with the uniform probability measure.  Keeping the base system
explicit gives exact Gram matrices and closed-form derivative bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateSystem, FrequencyOverflow

DEFAULT_GRID = 2**14
TRIG_REAL = "trig_real"
PERTURBED_RIESZ = "perturbed_riesz"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def base_frequencies(max_frequency: int) -> np.ndarray:
    """Frequencies of the base system ``1, cos, sin, cos, sin, ...``."""
    k = np.arange(2 * max_frequency + 1)
    return (k + 1) // 2


def base_weights(max_frequency: int) -> np.ndarray:
    """Squared L2 norms of the base elements (1 for the constant, 1/2 otherwise)."""
    w = np.full(2 * max_frequency + 1, 0.5)
    w[0] = 1.0
    return w


def base_eval(x, max_frequency: int) -> np.ndarray:
    """Evaluate the base system at ``x``; returns shape ``(len(x), 2n+1)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(1, max_frequency + 1)
    arg = 2.0 * np.pi * np.outer(x, k)
    out = np.empty((x.size, 2 * max_frequency + 1))
    out[:, 0] = 1.0
    out[:, 1::2] = np.cos(arg)
    out[:, 2::2] = np.sin(arg)
    return out


@lru_cache(maxsize=32)
def _base_grid(max_frequency: int, grid_size: int) -> np.ndarray:
    out = base_eval(np.arange(grid_size) / grid_size, max_frequency)
    out.setflags(write=False)
    return out


def uniform_grid(grid_size: int) -> np.ndarray:
    return np.arange(grid_size) / grid_size


@dataclass(frozen=True, eq=False)
class Dictionary:
    """A uniformly bounded Riesz system on [0, 1).

    Construct through :func:`make_trig_real` or :func:`make_perturbed_riesz`.
    ``riesz_lower`` and ``riesz_upper`` are the square roots of the extreme
    eigenvalues of ``gram``.
    """

    kind: str
    max_frequency: int
    mixing: np.ndarray
    gram: np.ndarray
    riesz_lower: float
    riesz_upper: float
    perturbation: float = 0.0
    seed: int | None = None
    permutation: tuple | None = None
    labels: tuple = field(default=())

    @property
    def N(self) -> int:
        return self.mixing.shape[0]

    @property
    def base_size(self) -> int:
        return self.mixing.shape[1]

    @property
    def norms(self) -> np.ndarray:
        """L2 norms of the elements."""
        return np.sqrt(np.diag(self.gram))

    @property
    def derivative_bounds(self) -> np.ndarray:
        """Upper bounds on ``sup |phi_j'|``."""
        freqs = base_frequencies(self.max_frequency)
        return 2.0 * np.pi * (np.abs(self.mixing) @ freqs)

    @property
    def is_plain_trig(self) -> bool:
        return (
            self.mixing.shape[0] == self.mixing.shape[1]
            and np.array_equal(self.mixing, np.eye(self.N))
        )

    def evaluate(self, x, indices=None) -> np.ndarray:
        """Element values at ``x`` as a ``(len(x), len(indices))`` matrix."""
        mix = self.mixing if indices is None else self.mixing[list(indices)]
        return base_eval(x, self.max_frequency) @ mix.T

    def grid_values(self, grid_size: int = DEFAULT_GRID, indices=None) -> np.ndarray:
        mix = self.mixing if indices is None else self.mixing[list(indices)]
        return _base_grid(self.max_frequency, grid_size) @ mix.T

    def restrict(self, indices) -> "Dictionary":
        """Sub-dictionary made of the listed elements, in the given order."""
        idx = [int(i) for i in indices]
        if not idx or len(set(idx)) != len(idx) or min(idx) < 0 or max(idx) >= self.N:
            raise ValueError(f"bad restriction indices {indices!r}")
        mixing = self.mixing[idx]
        gram = self.gram[np.ix_(idx, idx)]
        r1, r2 = _riesz_constants(gram)
        labels = tuple(self.labels[i] for i in idx) if self.labels else ()
        return Dictionary(
            kind=self.kind,
            max_frequency=self.max_frequency,
            mixing=_frozen(mixing),
            gram=_frozen(gram),
            riesz_lower=r1,
            riesz_upper=r2,
            perturbation=self.perturbation,
            seed=self.seed,
            permutation=self.permutation,
            labels=labels,
        )

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "N": self.N,
            "max_frequency": self.max_frequency,
            "perturbation": self.perturbation,
            "seed": self.seed,
            "riesz_lower": self.riesz_lower,
            "riesz_upper": self.riesz_upper,
        }


def _riesz_constants(gram) -> tuple[float, float]:
    eig = np.linalg.eigvalsh(gram)
    return math.sqrt(max(eig[0], 0.0)), math.sqrt(eig[-1])


def _trig_labels(max_frequency: int) -> tuple:
    labels = ["1"]
    for k in range(1, max_frequency + 1):
        labels += [f"cos(2pi*{k}x)", f"sin(2pi*{k}x)"]
    return tuple(labels)


def make_trig_real(max_frequency: int) -> Dictionary:
    """The real trigonometric system ``1, cos(2 pi k x), sin(2 pi k x)``, k <= n."""
    if max_frequency < 0:
        raise ValueError("max_frequency must be >= 0")
    n = int(max_frequency)
    gram = np.diag(base_weights(n))
    r1, r2 = _riesz_constants(gram)
    return Dictionary(
        kind=TRIG_REAL,
        max_frequency=n,
        mixing=_frozen(np.eye(2 * n + 1)),
        gram=_frozen(gram),
        riesz_lower=r1,
        riesz_upper=r2,
        labels=_trig_labels(n),
    )


def _derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


def make_perturbed_riesz(max_frequency: int, delta: float, seed: int) -> Dictionary:
    """Trig system with each element blended into a deranged partner.

    ``phi_j = (psi_j + delta * psi_sigma(j)) / (1 + delta)``.  Rows of the
    mixing matrix have l1 norm 1, so ``|phi_j| <= 1`` everywhere.
    """
    if not 0.0 <= delta < 0.5:
        raise ValueError("perturbation must lie in [0, 1/2)")
    n = int(max_frequency)
    if n < 0:
        raise ValueError("max_frequency must be >= 0")
    N = 2 * n + 1
    if delta > 0 and N < 2:
        raise ValueError("a perturbed system needs at least two elements")
    rng = np.random.default_rng(seed)
    perm = _derangement(N, rng) if N >= 2 else np.arange(N)
    mixing = np.eye(N)
    mixing[np.arange(N), perm] += delta
    mixing /= 1.0 + delta
    gram = mixing @ np.diag(base_weights(n)) @ mixing.T
    gram = 0.5 * (gram + gram.T)
    eig_min = np.linalg.eigvalsh(gram)[0]
    if eig_min <= 1e-10:
        raise DegenerateSystem(f"Gram minimum eigenvalue {eig_min:.3e}")
    r1, r2 = _riesz_constants(gram)
    return Dictionary(
        kind=PERTURBED_RIESZ,
        max_frequency=n,
        mixing=_frozen(mixing),
        gram=_frozen(gram),
        riesz_lower=r1,
        riesz_upper=r2,
        perturbation=float(delta),
        seed=seed,
        permutation=tuple(int(i) for i in perm),
    )


@dataclass(frozen=True, eq=False)
class SparseFunction:
    """A finite combination ``sum_{j in support} coeffs_j * phi_j``."""

    dictionary: Dictionary
    support: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if len(support) != coeffs.size:
            raise ValueError("support and coefficients differ in length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ValueError("support must be strictly increasing")
        if support and (support[0] < 0 or support[-1] >= self.dictionary.N):
            raise ValueError("support index out of range")
        coeffs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_dense(cls, dictionary: Dictionary, coeffs) -> "SparseFunction":
        """Build from a length-N coefficient vector, dropping exact zeros."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (dictionary.N,):
            raise ValueError(f"expected {dictionary.N} coefficients")
        support = np.flatnonzero(coeffs)
        return cls(dictionary, tuple(support), coeffs[support])

    @property
    def sparsity(self) -> int:
        return len(self.support)

    @property
    def dense(self) -> np.ndarray:
        out = np.zeros(self.dictionary.N)
        out[list(self.support)] = self.coeffs
        return out

    @property
    def base_coeffs(self) -> np.ndarray:
        """Coefficients with respect to the base trig system."""
        if not self.support:
            return np.zeros(self.dictionary.base_size)
        return self.coeffs @ self.dictionary.mixing[list(self.support)]

    def scaled(self, c: float) -> "SparseFunction":
        return SparseFunction(self.dictionary, self.support, c * self.coeffs)

    def __call__(self, x):
        return evaluate(self, x)


def evaluate(f: SparseFunction, x):
    """Value of ``f`` at ``x``; scalar in, scalar out."""
    xa = np.asarray(x, dtype=float)
    vals = base_eval(xa.reshape(-1), f.dictionary.max_frequency) @ f.base_coeffs
    return float(vals[0]) if xa.ndim == 0 else vals.reshape(xa.shape)


def grid_values(f: SparseFunction, grid_size: int = DEFAULT_GRID) -> np.ndarray:
    return _base_grid(f.dictionary.max_frequency, grid_size) @ f.base_coeffs


@dataclass(frozen=True)
class NormSpec:
    """Exponent and quadrature resolution for continuous L_p norms.

    With ``exact_l2`` set, p = 2 goes through the Gram quadratic form instead
    of the grid.
    """

    p: float = 2.0
    grid_size: int = DEFAULT_GRID
    exact_l2: bool = True

    def __post_init__(self):
        if not 1.0 <= self.p <= math.inf:
            raise ValueError("p must lie in [1, inf]")
        if self.grid_size < 1:
            raise ValueError("grid_size must be positive")

    def check_resolution(self, dictionary: Dictionary) -> None:
        need = 2 * dictionary.max_frequency * max(2, math.ceil(self.p))
        if self.grid_size < need:
            raise ValueError(
                f"grid_size {self.grid_size} too coarse for max_frequency "
                f"{dictionary.max_frequency} at p={self.p} (need >= {need})"
            )


def lp_norm(f: SparseFunction, spec: NormSpec) -> float:
    """Continuous L_p norm of ``f`` for finite p."""
    if math.isinf(spec.p):
        raise ValueError("lp_norm needs finite p; use sup_norm")
    if spec.p == 2 and spec.exact_l2:
        idx = list(f.support)
        if not idx:
            return 0.0
        g = f.dictionary.gram[np.ix_(idx, idx)]
        return math.sqrt(max(float(f.coeffs @ g @ f.coeffs), 0.0))
    spec.check_resolution(f.dictionary)
    vals = np.abs(grid_values(f, spec.grid_size))
    return float(np.mean(vals**spec.p) ** (1.0 / spec.p))


def sup_norm(f: SparseFunction, grid_size: int = DEFAULT_GRID) -> tuple[float, float]:
    """Bracket ``grid_max <= ||f||_inf <= certified_upper``.

    The upper side is the grid maximum plus ``L h / 2`` with ``L`` a bound on
    ``|f'|``, capped by the l1 norm of the base coefficients (every element is
    bounded by 1).
    """
    b = f.base_coeffs
    grid_max = float(np.max(np.abs(grid_values(f, grid_size)))) if b.size else 0.0
    lip = 2.0 * np.pi * float(np.abs(b) @ base_frequencies(f.dictionary.max_frequency))
    upper = min(grid_max + lip / (2.0 * grid_size), float(np.abs(b).sum()))
    return grid_max, max(upper, grid_max)


def lacunary_function(v: int, dictionary: Dictionary) -> SparseFunction:
    """``sum_{j=1}^v cos(2 pi 2^j x)`` over the plain trig system."""
    if v < 1:
        raise ValueError("v must be >= 1")
    if dictionary.kind != TRIG_REAL or not dictionary.is_plain_trig:
        raise ValueError("lacunary_function needs a full trig_real dictionary")
    if 2**v > dictionary.max_frequency:
        raise FrequencyOverflow(
            f"frequency 2^{v} exceeds max_frequency {dictionary.max_frequency}"
        )
    support = tuple(2 * 2**j - 1 for j in range(1, v + 1))
    return SparseFunction(dictionary, support, np.ones(v))


def random_sparse(dictionary: Dictionary, v: int, rng: np.random.Generator) -> SparseFunction:
    """Random support of size ``v`` with standard normal coefficients."""
    support = np.sort(rng.choice(dictionary.N, size=v, replace=False))
    return SparseFunction(dictionary, tuple(support), rng.standard_normal(v))
