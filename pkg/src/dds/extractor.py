"""
Distinct-distance subsets of planar point sets.

Pipeline: the 4-uniform hypergraph of singular quadruples, the Spencer
independence bound, a seeded sample-and-delete independent set, and a direct
verification of the distinct-distance predicate.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from src.config.settings import settings
from src.core.errors import CapExceededError, RoundLimitError, UsageError
from src.core.pointset import Coords, PointSet, pairwise_distances
from src.utils.exact import ceil_fraction, floor_root
from src.utils.parallel import chunked_map_reduce

logger = logging.getLogger(__name__)


@dataclass
class Hypergraph4:
    """Vertices 0..n-1; edges are sorted, distinct 4-subsets stored as rows."""

    n: int
    edges: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 4)
        if len(self.edges):
            rows = np.sort(self.edges, axis=1)
            if (np.diff(rows, axis=1) == 0).any():
                raise ValueError("hyperedges need four distinct vertices")
            if rows.min() < 0 or rows.max() >= self.n:
                raise ValueError(f"hyperedge vertex outside [0, {self.n})")
            self.edges = np.unique(rows, axis=0)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_set(self) -> Set[Tuple[int, ...]]:
        return {tuple(int(v) for v in e) for e in self.edges}

    def is_independent(self, vertices: Sequence[int]) -> bool:
        chosen = np.zeros(self.n, dtype=bool)
        chosen[list(vertices)] = True
        return not bool(chosen[self.edges].all(axis=1).any()) if self.m else True


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    rows = np.sort(rows, axis=1)
    return ((rows[:, 0] * n + rows[:, 1]) * n + rows[:, 2]) * n + rows[:, 3]


def _decode(codes: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((len(codes), 4), dtype=np.int64)
    for col in range(3, -1, -1):
        codes, out[:, col] = np.divmod(codes, n)
    return out


@dataclass
class SingularQuadruples:
    hypergraph: Hypergraph4
    hinge_edges: int
    zero_edges: int

    @property
    def hinge_free_edges(self) -> int:
        return self.hypergraph.m - self.hinge_edges


def _concat(left: List[np.ndarray], right: List[np.ndarray]) -> List[np.ndarray]:
    return left + right


def _check_point_cap(pointset: PointSet) -> None:
    if len(pointset) > settings.DDS_POINT_CAP:
        raise CapExceededError("singular quadruple point count", len(pointset), settings.DDS_POINT_CAP)


def singular_quadruples(pointset: PointSet, threads: Optional[int] = None) -> SingularQuadruples:
    """
    4-subsets whose six distances repeat a value. A repeat is either two
    disjoint pairs in one distance bucket, or a hinge {p, q}, {p, r} extended
    by any fourth point.
    """
    _check_point_cap(pointset)
    n, q = len(pointset), pointset.q
    threads = settings.THREADS if threads is None else threads
    if n < 4:
        return SingularQuadruples(Hypergraph4(n, np.empty((0, 4))), 0, 0)

    dist = pairwise_distances(pointset)
    iu, ju = np.triu_indices(n, 1)
    pair_dist = dist[iu, ju]

    def disjoint(buckets: List[int]) -> List[np.ndarray]:
        found = []
        for t in buckets:
            sel = np.flatnonzero(pair_dist == t)
            if len(sel) < 2:
                continue
            a, b = np.triu_indices(len(sel), 1)
            p1 = np.stack([iu[sel[a]], ju[sel[a]]], axis=1)
            p2 = np.stack([iu[sel[b]], ju[sel[b]]], axis=1)
            apart = (p1[:, :, None] != p2[:, None, :]).all(axis=(1, 2))
            found.append(_encode(np.hstack([p1[apart], p2[apart]]), n))
        return found

    everyone = np.arange(n)

    def hinges(apexes: List[int]) -> List[np.ndarray]:
        found = []
        for p in apexes:
            others = everyone[everyone != p]
            for t in np.unique(dist[p, others]):
                arms = others[dist[p, others] == t]
                if len(arms) < 2:
                    continue
                a, b = np.triu_indices(len(arms), 1)
                triples = np.stack([np.full(len(a), p), arms[a], arms[b]], axis=1)
                fourth = np.broadcast_to(everyone, (len(triples), n))
                keep = (fourth[:, :, None] != triples[:, None, :]).all(axis=2)
                rows = np.repeat(triples, keep.sum(axis=1), axis=0)
                found.append(_encode(np.hstack([rows, fourth[keep][:, None]]), n))
        return found

    disjoint_codes = chunked_map_reduce(list(range(q)), disjoint, _concat, [], threads)
    hinge_codes = chunked_map_reduce(list(range(n)), hinges, _concat, [], threads)

    hinge_unique = np.unique(np.concatenate(hinge_codes)) if hinge_codes else np.empty(0, dtype=np.int64)
    parts = disjoint_codes + [hinge_unique]
    codes = np.unique(np.concatenate(parts))
    edges = _decode(codes, n)

    zero = np.zeros(len(edges), dtype=bool)
    for i, j in itertools.combinations(range(4), 2):
        zero |= dist[edges[:, i], edges[:, j]] == 0
    result = SingularQuadruples(Hypergraph4(n, edges), len(hinge_unique), int(zero.sum()))
    logger.info("singular quadruples |E|=%d: %d edges (%d with a hinge, %d with a zero distance)",
                n, result.hypergraph.m, result.hinge_edges, result.zero_edges)
    return result


def singular_quadruples_naive(pointset: PointSet) -> Hypergraph4:
    """Reference enumeration over every 4-subset."""
    _check_point_cap(pointset)
    dist = pairwise_distances(pointset)
    edges = []
    for quad in itertools.combinations(range(len(pointset)), 4):
        values = [dist[i, j] for i, j in itertools.combinations(quad, 2)]
        if len(set(values)) < 6:
            edges.append(quad)
    return Hypergraph4(len(pointset), np.array(edges, dtype=np.int64).reshape(-1, 4))


# ---------------------------------------------------------------------------
# Spencer bound and independent sets
# ---------------------------------------------------------------------------

@dataclass
class SpencerBound:
    n: int
    k: int
    m: int
    hypothesis_holds: bool
    whole_set: bool
    floor_value: int
    value: Fraction
    target: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "hypothesis_holds": self.hypothesis_holds,
            "whole_set": self.whole_set,
            "floor": self.floor_value,
            "value": self.value,
            "target": self.target,
        }


def spencer_floor(n: int, k: int, m: int) -> SpencerBound:
    """
    (1 - 1/k) floor((n^k / (k m))^{1/(k-1)}) for a k-uniform hypergraph with
    m >= n/k edges. m = 0 gives the whole vertex set; m < n/k gives no bound.
    """
    if k < 2:
        raise UsageError(f"Spencer bound needs k >= 2, got {k}")
    if n < 0 or m < 0:
        raise UsageError("n and m must be non-negative")
    if m == 0:
        return SpencerBound(n, k, 0, True, True, n, Fraction(n), n)
    if k * m < n:
        return SpencerBound(n, k, m, False, False, 0, Fraction(0), 0)
    floor_value = floor_root(n**k, k * m, k - 1)
    value = (1 - Fraction(1, k)) * floor_value
    return SpencerBound(n, k, m, True, False, floor_value, value, ceil_fraction(value))


def keep_probability(n: int, k: int, m: int) -> float:
    if m == 0 or n == 0:
        return 1.0
    return min(1.0, (n / (k * m)) ** (1.0 / (k - 1)))


def independent_set(
    hypergraph: Hypergraph4,
    seed: int,
    target: Optional[int] = None,
    rounds: Optional[int] = None,
) -> List[int]:
    """
    Sample-and-delete: keep each vertex with probability p, then drop the
    largest vertex of every edge still fully kept. Rounds repeat with fresh
    draws from the seeded generator until ``target`` is met.
    """
    n, k, m = hypergraph.n, 4, hypergraph.m
    if target is None:
        target = spencer_floor(n, k, m).target
    rounds = settings.SPENCER_ROUND_LIMIT if rounds is None else rounds
    if m == 0:
        return list(range(n))

    p = keep_probability(n, k, m)
    rng = np.random.default_rng(seed)
    best: List[int] = []
    for attempt in range(1, rounds + 1):
        alive = rng.random(n) < p
        for edge in hypergraph.edges[alive[hypergraph.edges].all(axis=1)]:
            if alive[edge].all():
                alive[edge[-1]] = False
        chosen = np.flatnonzero(alive).tolist()
        if len(chosen) > len(best):
            best = chosen
        if len(best) >= target:
            logger.debug("independent set of size %d after %d round(s)", len(best), attempt)
            return best
    raise RoundLimitError(rounds, target, best)


# ---------------------------------------------------------------------------
# Verification and the full pipeline
# ---------------------------------------------------------------------------

@dataclass
class DistinctDistanceCertificate:
    ok: bool
    witness: Optional[Tuple[Coords, Coords, Coords, Coords]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "witness": [list(p) for p in self.witness] if self.witness else None}


def verify_distinct_distance(points: Sequence[Sequence[int]], q: int) -> DistinctDistanceCertificate:
    """
    True iff no four distinct points x, y, z, t have ||x - y|| = ||z - t||.
    Equal distances on pairs sharing a point are allowed.
    """
    pts = [tuple(int(c) for c in p) for p in points]
    buckets: Dict[int, List[Tuple[int, int]]] = {}
    for i, j in itertools.combinations(range(len(pts)), 2):
        t = sum((a - b) ** 2 for a, b in zip(pts[i], pts[j])) % q
        for k, l in buckets.get(t, []):
            if len({i, j, k, l}) == 4:
                return DistinctDistanceCertificate(False, (pts[k], pts[l], pts[i], pts[j]))
        buckets.setdefault(t, []).append((i, j))
    return DistinctDistanceCertificate(True)


def pigeonhole_thresholds(q: int) -> Dict[str, int]:
    """Least x with x(x-1)/2 > q, next to ceil(sqrt(2q)) + 1."""
    x = 2
    while x * (x - 1) // 2 <= q:
        x += 1
    return {"exact": x, "sqrt_2q_plus_1": math.isqrt(2 * q - 1) + 2}


@dataclass
class DDSResult:
    n: int
    q: int
    edges: int
    hinge_edges: int
    hinge_free_edges: int
    zero_edges: int
    spencer: SpencerBound
    subset: List[Coords]
    certificate: DistinctDistanceCertificate
    independent: bool
    seed: int
    pigeonhole: Dict[str, int] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.certificate.ok and self.independent

    @property
    def meets_floor(self) -> bool:
        return len(self.subset) >= self.spencer.target

    @property
    def edge_constant(self) -> Fraction:
        """|E(H)| q / |E|^4."""
        return Fraction(self.edges * self.q, self.n**4) if self.n else Fraction(0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "edges": self.edges,
            "hinge_edges": self.hinge_edges,
            "hinge_free_edges": self.hinge_free_edges,
            "zero_edges": self.zero_edges,
            "spencer_floor": self.spencer.target,
            "spencer": self.spencer.to_dict(),
            "subset": [list(p) for p in self.subset],
            "verified": self.verified,
            "independent": self.independent,
            "certificate": self.certificate.to_dict(),
            "edge_constant": self.edge_constant,
            "pigeonhole": self.pigeonhole,
            "subset_within_pigeonhole": len(self.subset) < self.pigeonhole.get("exact", 0),
            "seed": self.seed,
        }


def dds_extract(pointset: PointSet, seed: Optional[int] = None, threads: Optional[int] = None) -> DDSResult:
    """Extract a distinct-distance subset at least as large as the Spencer floor."""
    if pointset.d != 2:
        raise UsageError(f"distinct-distance extraction is planar, got d={pointset.d}")
    seed = settings.SEED if seed is None else seed
    singular = singular_quadruples(pointset, threads=threads)
    graph = singular.hypergraph
    bound = spencer_floor(graph.n, 4, graph.m)
    chosen = independent_set(graph, seed, bound.target)
    subset = [pointset.points[i] for i in chosen]
    certificate = verify_distinct_distance(subset, pointset.q)
    independent = graph.is_independent(chosen)
    if certificate.ok != independent:
        logger.error("hypergraph and direct verification disagree on %d points", len(subset))

    result = DDSResult(
        n=graph.n,
        q=pointset.q,
        edges=graph.m,
        hinge_edges=singular.hinge_edges,
        hinge_free_edges=singular.hinge_free_edges,
        zero_edges=singular.zero_edges,
        spencer=bound,
        subset=subset,
        certificate=certificate,
        independent=independent,
        seed=seed,
        pigeonhole=pigeonhole_thresholds(pointset.q),
    )
    logger.info("dds |E|=%d seed=%d: |U|=%d (floor %d), verified=%s",
                graph.n, seed, len(subset), bound.target, result.verified)
    return result
