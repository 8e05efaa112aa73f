"""
(n, d, lambda)-graphs: the Erdos-Renyi polarity graph, the reflection graph,
dense spectra, and the multiset expander-mixing evaluator.

Loops count once in a vertex's degree and once per ordered pair in e(B, C).
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import settings
from src.core.errors import CapExceededError, FieldError
from src.core.ff import FieldElement, enumerate_pg, pg_size, require_odd_prime
from src.core.motions import reflection_maps, unit_circle
from src.utils.exact import abs_le_sqrt

logger = logging.getLogger(__name__)


@dataclass
class NDLGraph:
    """A graph with a dense 0/1 adjacency matrix and its claimed (n, d, lambda)."""

    name: str
    labels: List[Hashable]
    adjacency: np.ndarray
    declared_n: int
    declared_degree: int
    declared_lambda_squared: Fraction
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def declared_lambda(self) -> float:
        return math.sqrt(self.declared_lambda_squared)

    @functools.cached_property
    def index(self) -> Dict[Hashable, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def adj(self, i: int, j: int) -> int:
        return int(self.adjacency[i, j])

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.adjacency, self.adjacency.T))

    def loops(self) -> int:
        return int(np.trace(self.adjacency))

    def with_declared_lambda(self, lambda_squared: Fraction) -> "NDLGraph":
        """Same graph with an overridden lambda claim."""
        return NDLGraph(
            self.name, self.labels, self.adjacency, self.declared_n,
            self.declared_degree, Fraction(lambda_squared), dict(self.params, lambda_overridden=True),
        )

    def edge_list(self) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def dump_edges(self) -> str:
        """One "i j" line per edge with i <= j."""
        return "".join(f"{i} {j}\n" for i, j in self.edge_list())

    def declared(self) -> Dict[str, Any]:
        return {
            "n": self.declared_n,
            "degree": self.declared_degree,
            "lambda": self.declared_lambda,
            "lambda_squared": self.declared_lambda_squared,
        }


def build_er_graph(q: int, m: int) -> NDLGraph:
    """ER(F_q^m): vertices PG(q, m), x ~ y iff x . y = 0, loops at isotropic points."""
    require_odd_prime(q)
    if m < 2:
        raise FieldError(f"ER graph needs m >= 2, got {m}")
    n = pg_size(q, m)
    if n > settings.ER_VERTEX_CAP:
        raise CapExceededError("ER graph vertex count", n, settings.ER_VERTEX_CAP)

    points = enumerate_pg(q, m)
    coords = np.array([p.coords for p in points], dtype=np.int64)
    adjacency = ((coords @ coords.T) % q == 0).astype(np.int8)
    graph = NDLGraph(
        name=f"ER(F_{q}^{m})",
        labels=[p.coords for p in points],
        adjacency=adjacency,
        declared_n=n,
        declared_degree=pg_size(q, m - 1),
        declared_lambda_squared=Fraction(q ** (m - 2)),
        params={"q": q, "m": m, "prime_field_only": True},
    )
    logger.debug("built %s with %d vertices and %d loops", graph.name, n, graph.loops())
    return graph


def circle_branch(q: int) -> int:
    """+1 when -1 is a non-square (q = 3 mod 4, circles have q + 1 points), -1 otherwise."""
    return -1 if FieldElement(q - 1, q).is_square() else 1


def build_reflection_graph(q: int, lam: int) -> NDLGraph:
    """
    RF_lam: vertices are ordered pairs (x, y) in (F_q^2)^2 with ||x - y|| = lam;
    (x, y) ~ (z, w) iff one reflection R_u maps x to z and y to w. Built by
    applying every distinct reflection map to every vertex.
    """
    require_odd_prime(q)
    if q > settings.REFLECTION_Q_CAP:
        raise CapExceededError("reflection graph q", q, settings.REFLECTION_Q_CAP)
    lam %= q
    if lam == 0:
        raise FieldError("reflection graph needs lam != 0")

    plane = list(itertools.product(range(q), repeat=2))
    labels = [
        x + y for x in plane for y in plane
        if ((x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2) % q == lam
    ]
    verts = np.array(labels, dtype=np.int64)
    weights = q ** np.arange(4, dtype=np.int64)
    lookup = np.full(q**4, -1, dtype=np.int64)
    lookup[verts @ weights] = np.arange(len(labels))

    adjacency = np.zeros((len(labels), len(labels)), dtype=np.int8)
    rows = np.arange(len(labels))
    maps = reflection_maps(q)
    for r in maps:
        mat = np.array(r.matrix, dtype=np.int64)
        t = np.array(r.translation, dtype=np.int64)
        x_img = (verts[:, :2] @ mat.T + t) % q
        y_img = (verts[:, 2:] @ mat.T + t) % q
        cols = lookup[np.hstack([x_img, y_img]) @ weights]
        assert (cols >= 0).all(), "reflection moved a vertex off the distance class"
        adjacency[rows, cols] = 1

    branch = circle_branch(q)
    s = q + branch
    assert len(unit_circle(q)) == s
    graph = NDLGraph(
        name=f"RF_{lam}(F_{q}^2)",
        labels=labels,
        adjacency=adjacency,
        declared_n=q * q * s,
        declared_degree=q * s,
        declared_lambda_squared=Fraction((2 * s) ** 2),
        params={"q": q, "lam": lam, "branch": "+" if branch > 0 else "-", "reflections": len(maps)},
    )
    logger.debug("built %s with %d vertices from %d reflections", graph.name, graph.n, len(maps))
    return graph


def complete_graph(n: int) -> NDLGraph:
    """K_n without loops, declared as an (n, n - 1, 1)-graph."""
    adjacency = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
    return NDLGraph(f"K_{n}", list(range(n)), adjacency, n, n - 1, Fraction(1))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    eigenvalues: List[float]
    perron: float
    lambda2: float
    degree_min: int
    degree_max: int
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "degree_min": self.degree_min,
            "degree_max": self.degree_max,
            "lambda2": self.lambda2,
            "perron": self.perron,
            "spectrum": self.eigenvalues,
        }


def second_eigenvalue(g: NDLGraph) -> SpectrumReport:
    """
    Largest |mu| over the spectrum with one copy of the top eigenvalue removed.
    For a connected regular graph the top eigenvalue is the degree.
    """
    if g.n > settings.DENSE_SOLVER_CAP:
        raise CapExceededError("dense eigensolver size", g.n, settings.DENSE_SOLVER_CAP)
    if not g.is_symmetric():
        raise RuntimeError(f"{g.name}: adjacency is not symmetric")

    eigenvalues = np.linalg.eigvalsh(g.adjacency.astype(np.float64))
    top = int(np.argmax(eigenvalues))
    rest = np.delete(eigenvalues, top)
    lambda2 = float(np.abs(rest).max()) if rest.size else 0.0
    degrees = g.degrees()
    return SpectrumReport(
        eigenvalues=[float(v) for v in np.sort(eigenvalues)],
        perron=float(eigenvalues[top]),
        lambda2=lambda2,
        degree_min=int(degrees.min()),
        degree_max=int(degrees.max()),
        n=g.n,
    )


def spectrum_summary(g: NDLGraph, spectrum: Optional[SpectrumReport] = None) -> Dict[str, Any]:
    """The spectrum CLI payload: declared parameters, measured ones, and a verdict."""
    spectrum = spectrum or second_eigenvalue(g)
    passed = (
        spectrum.n == g.declared_n
        and spectrum.degree_min == spectrum.degree_max == g.declared_degree
        and spectrum.lambda2 <= g.declared_lambda + settings.COMPARE_TOL
    )
    return {
        "graph": g.name,
        "params": g.params,
        "declared": {"n": g.declared_n, "degree": g.declared_degree, "lambda": g.declared_lambda},
        "measured": {
            "n": spectrum.n,
            "degree_min": spectrum.degree_min,
            "degree_max": spectrum.degree_max,
            "lambda2": spectrum.lambda2,
        },
        "pass": bool(passed),
    }


# ---------------------------------------------------------------------------
# Expander mixing
# ---------------------------------------------------------------------------

@dataclass
class VertexMultiset:
    """Multiplicities m_X(x) >= 1 on a set of vertex indices."""

    counts: Dict[int, int]

    def __post_init__(self):
        bad = {v: m for v, m in self.counts.items() if m < 1}
        if bad:
            raise ValueError(f"multiplicities must be positive: {bad}")

    @classmethod
    def uniform(cls, vertices: Sequence[int]) -> "VertexMultiset":
        return cls({int(v): 1 for v in vertices})

    @classmethod
    def from_items(cls, items: Sequence[int]) -> "VertexMultiset":
        counts: Dict[int, int] = {}
        for v in items:
            counts[int(v)] = counts.get(int(v), 0) + 1
        return cls(counts)

    @property
    def size(self) -> int:
        return sum(self.counts.values())

    def square_sum(self) -> int:
        return sum(m * m for m in self.counts.values())

    def vector(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.int64)
        for v, m in self.counts.items():
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} outside [0, {n})")
            out[v] = m
        return out


@dataclass
class MixingResult:
    edges: int
    main_term: Fraction
    error_squared: Fraction
    holds: bool

    @property
    def error_bound(self) -> float:
        return math.sqrt(self.error_squared)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges": self.edges,
            "main_term": self.main_term,
            "error_bound": self.error_bound,
            "error_squared": self.error_squared,
            "holds": self.holds,
        }


def mixing_edges(g: NDLGraph, b: VertexMultiset, c: VertexMultiset) -> MixingResult:
    """
    e(B, C) over ordered pairs with multiplicity against
    degree |B||C| / n +- lambda sqrt(sum m_B^2 sum m_C^2), decided exactly.
    """
    mb, mc = b.vector(g.n), c.vector(g.n)
    edges = int(mb @ g.adjacency.astype(np.int64) @ mc)
    main = Fraction(g.declared_degree * b.size * c.size, g.declared_n)
    err_sq = g.declared_lambda_squared * b.square_sum() * c.square_sum()
    holds = abs_le_sqrt(edges - main, g.declared_lambda_squared, b.square_sum() * c.square_sum())
    return MixingResult(edges, main, err_sq, holds)


def random_multiset(n: int, rng: np.random.Generator, max_multiplicity: int = 3) -> VertexMultiset:
    """Random support of random size with multiplicities in [1, max_multiplicity]."""
    size = int(rng.integers(1, n + 1))
    support = rng.choice(n, size=size, replace=False)
    mults = rng.integers(1, max_multiplicity + 1, size=size)
    return VertexMultiset({int(v): int(m) for v, m in zip(support, mults)})


@dataclass
class MixingTrials:
    trials: int
    violations: int
    worst_ratio: Fraction
    results: List[MixingResult]

    def to_dict(self) -> Dict[str, Any]:
        return {"trials": self.trials, "violations": self.violations, "worst_ratio": self.worst_ratio}


def mixing_trials(g: NDLGraph, trials: int, seed: int, max_multiplicity: int = 3) -> MixingTrials:
    """Seeded random multiset pairs; worst_ratio is max (e - main)^2 / error^2."""
    rng = np.random.default_rng(seed)
    results = []
    worst = Fraction(0)
    for _ in range(trials):
        b = random_multiset(g.n, rng, max_multiplicity)
        c = random_multiset(g.n, rng, max_multiplicity)
        res = mixing_edges(g, b, c)
        results.append(res)
        if res.error_squared:
            worst = max(worst, (res.edges - res.main_term) ** 2 / res.error_squared)
    violations = sum(not r.holds for r in results)
    if violations:
        logger.warning("%s: %d of %d mixing trials violated", g.name, violations, trials)
    return MixingTrials(trials, violations, worst, results)
