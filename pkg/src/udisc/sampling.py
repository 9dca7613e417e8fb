"""Point sets on [0, 1) and discrete L_p norms over them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .function_space import SparseFunction, evaluate


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered sample nodes with a record of how they were produced.

    ``provenance`` is a plain dict with at least a ``"kind"`` key
    (``iid``, ``equispaced``, ``two_stage`` or ``explicit``).
    """

    nodes: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1)
        if nodes.size < 1:
            raise ValueError("a point set needs at least one node")
        if np.any(nodes < 0.0) or np.any(nodes >= 1.0):
            raise ValueError("nodes must lie in [0, 1)")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def m(self) -> int:
        return self.nodes.size

    def __len__(self):
        return self.m

    def subset(self, indices, provenance: dict | None = None) -> "PointSet":
        return PointSet(self.nodes[np.asarray(indices)], provenance or {"kind": "explicit"})

    def to_json(self) -> str:
        """JSON text with nodes written to 17 significant digits."""
        head = json.dumps({"m": self.m, "provenance": self.provenance}, sort_keys=True)
        nodes = ", ".join(format(float(x), ".17g") for x in self.nodes)
        return head[:-1] + f', "nodes": [{nodes}]}}'

    @classmethod
    def from_json(cls, text: str) -> "PointSet":
        doc = json.loads(text)
        nodes = doc["nodes"]
        if "m" in doc and doc["m"] != len(nodes):
            raise ValueError("node count does not match m")
        return cls(np.array(nodes, dtype=float), doc.get("provenance", {"kind": "explicit"}))


def sample_iid(m: int, seed: int) -> PointSet:
    """``m`` iid uniform points from a seeded PCG64 generator."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    return PointSet(rng.random(m), {"kind": "iid", "seed": int(seed)})


def equispaced(m: int) -> PointSet:
    if m < 1:
        raise ValueError("m must be >= 1")
    return PointSet(np.arange(m) / m, {"kind": "equispaced"})


def as_nodes(xi) -> np.ndarray:
    return xi.nodes if isinstance(xi, PointSet) else np.asarray(xi, dtype=float).reshape(-1)


def discrete_lp(f: SparseFunction, xi, p: float) -> float:
    """``((1/m) sum_j |f(xi_j)|^p)^(1/p)``."""
    if not 1.0 <= p < np.inf:
        raise ValueError("p must lie in [1, inf)")
    vals = np.abs(evaluate(f, as_nodes(xi)))
    return float(np.mean(vals**p) ** (1.0 / p))
