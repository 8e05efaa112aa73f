"""
Congruence-class census of k-simplices.

A k-simplex is an ordered (k+1)-tuple of points of E, repetitions allowed.
The census keys each tuple by its distance matrix; the orbit census keys it
by its true rigid-motion orbit.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import settings
from src.core.errors import CapExceededError, UsageError
from src.core.ff import rank_mod
from src.core.motions import group_array, orthogonal_order
from src.core.pointset import Coords, PointSet, pairwise_distances
from src.utils.parallel import chunked_map_reduce

logger = logging.getLogger(__name__)


def _pairs(k: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(k + 1), 2))


@dataclass(frozen=True, order=True)
class DistanceMatrix:
    """Upper triangle d_{i,j}, i < j, of a (k+1)-tuple's distances, row-major."""

    k: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != (self.k + 1) * self.k // 2:
            raise ValueError(f"k={self.k} needs {(self.k + 1) * self.k // 2} entries")

    @classmethod
    def of(cls, points: Sequence[Coords], q: int) -> "DistanceMatrix":
        k = len(points) - 1
        return cls(k, tuple(
            sum((a - b) ** 2 for a, b in zip(points[i], points[j])) % q
            for i, j in _pairs(k)
        ))

    @classmethod
    def decode(cls, code: int, k: int, q: int) -> "DistanceMatrix":
        size = (k + 1) * k // 2
        digits = []
        for _ in range(size):
            code, r = divmod(code, q)
            digits.append(r)
        return cls(k, tuple(reversed(digits)))

    def encode(self, q: int) -> int:
        code = 0
        for e in self.entries:
            code = code * q + e
        return code

    def matrix(self) -> List[List[int]]:
        out = [[0] * (self.k + 1) for _ in range(self.k + 1)]
        for (i, j), e in zip(_pairs(self.k), self.entries):
            out[i][j] = out[j][i] = e
        return out

    @property
    def key(self) -> str:
        return ",".join(str(e) for e in self.entries)

    def __str__(self) -> str:
        return self.key


@dataclass
class Census:
    """mu(D) for every realised distance matrix D."""

    k: int
    q: int
    size: int
    mu: Dict[DistanceMatrix, int]
    exact: bool = True
    sampled: int = 0

    @property
    def total(self) -> int:
        return sum(self.mu.values())

    @property
    def support_size(self) -> int:
        return len(self.mu)

    def square_sum(self) -> int:
        return sum(v * v for v in self.mu.values())

    def mass_identity_holds(self) -> bool:
        return not self.exact or self.total == self.size ** (self.k + 1)

    def top_classes(self, limit: int = 10) -> List[Dict[str, Any]]:
        ranked = sorted(self.mu.items(), key=lambda kv: (-kv[1], kv[0]))
        return [{"key": dm.key, "count": count} for dm, count in ranked[:limit]]

    def to_dict(self, limit: int = 10) -> Dict[str, Any]:
        return {
            "k": self.k,
            "total": self.total,
            "support_size": self.support_size,
            "exact": self.exact,
            "sampled": self.sampled,
            "top_classes": self.top_classes(limit),
        }

    def to_csv(self) -> str:
        lines = ["key,count"]
        lines.extend(f"\"{dm.key}\",{count}" for dm, count in sorted(self.mu.items()))
        return "\n".join(lines) + "\n"


def _tuple_grid(n: int, k: int) -> List[np.ndarray]:
    """Index arrays over the last k tuple slots, broadcast to shape (n,) * k."""
    return [np.arange(n).reshape((1,) * j + (n,) + (1,) * (k - 1 - j)) for j in range(k)]


def _dm_codes(dist: np.ndarray, first: int, k: int, q: int) -> np.ndarray:
    """Encoded distance matrices of every tuple (first, i_1, ..., i_k), lexicographic."""
    n = dist.shape[0]
    slots = [np.full((1,) * k, first)] + _tuple_grid(n, k)
    code = np.zeros((n,) * k, dtype=np.int64)
    for i, j in _pairs(k):
        code = code * q + dist[slots[i], slots[j]]
    return code.ravel()


def simplex_census(
    pointset: PointSet,
    k: int,
    threads: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
) -> Census:
    """
    Exact mu over all |E|^{k+1} ordered tuples, chunked over the first slot.
    Over the tuple cap, ``sample`` switches to seeded uniform sampling and the
    result is flagged non-exact.
    """
    if k < 0 or k > pointset.d:
        raise UsageError(f"census needs 0 <= k <= d, got k={k}, d={pointset.d}")
    q, n = pointset.q, len(pointset)
    work = n ** (k + 1)
    if work > settings.CENSUS_TUPLE_CAP:
        if sample is None:
            raise CapExceededError(
                "census tuple count (pass a sample size for a non-exact estimate)",
                work, settings.CENSUS_TUPLE_CAP,
            )
        return _sampled_census(pointset, k, sample, settings.SEED if seed is None else seed)

    if k == 0:
        return Census(0, q, n, {DistanceMatrix(0, ()): n})

    dist = pairwise_distances(pointset)
    threads = settings.THREADS if threads is None else threads

    def sweep(firsts: List[int]) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for first in firsts:
            codes, hits = np.unique(_dm_codes(dist, first, k, q), return_counts=True)
            for code, hit in zip(codes.tolist(), hits.tolist()):
                counts[code] = counts.get(code, 0) + hit
        return counts

    def merge(left: Dict[int, int], right: Dict[int, int]) -> Dict[int, int]:
        for code, hit in right.items():
            left[code] = left.get(code, 0) + hit
        return left

    counts = chunked_map_reduce(list(range(n)), sweep, merge, {}, threads)
    mu = {DistanceMatrix.decode(code, k, q): hit for code, hit in sorted(counts.items())}
    census = Census(k, q, n, mu)
    logger.info("census q=%d d=%d |E|=%d k=%d: |T|=%d", q, pointset.d, n, k, census.support_size)
    return census


def _sampled_census(pointset: PointSet, k: int, sample: int, seed: int) -> Census:
    rng = np.random.default_rng(seed)
    dist = pairwise_distances(pointset)
    idx = rng.integers(0, len(pointset), size=(sample, k + 1))
    code = np.zeros(sample, dtype=np.int64)
    for i, j in _pairs(k):
        code = code * pointset.q + dist[idx[:, i], idx[:, j]]
    codes, hits = np.unique(code, return_counts=True)
    mu = {DistanceMatrix.decode(int(c), k, pointset.q): int(h) for c, h in zip(codes, hits)}
    logger.warning("census over cap: sampled %d tuples, result is an estimate", sample)
    return Census(k, pointset.q, len(pointset), mu, exact=False, sampled=sample)


def cauchy_schwarz_lower_bound(census: Census) -> Tuple[Fraction, int]:
    """(sum mu)^2 / sum mu^2, which never exceeds |T| = |support(mu)|."""
    bound = Fraction(census.total ** 2, census.square_sum())
    exact_t = census.support_size
    assert bound <= exact_t, f"Cauchy-Schwarz bound {bound} exceeds |T| = {exact_t}"
    return bound, exact_t


# ---------------------------------------------------------------------------
# Orbits under rigid motions
# ---------------------------------------------------------------------------

@dataclass
class Orbit:
    """One rigid-motion orbit of (k+1)-tuples."""

    count: int
    stabilizer: int
    representative: Tuple[int, ...]
    distance_matrix: DistanceMatrix
    rank: int = 0
    nondegenerate_span: bool = True

    def stabilizer_bound(self, q: int, d: int) -> int:
        return orthogonal_order(q, d - self.rank)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "stabilizer": self.stabilizer,
            "representative": list(self.representative),
            "distance_matrix": self.distance_matrix.key,
            "rank": self.rank,
            "nondegenerate_span": self.nondegenerate_span,
        }


@dataclass
class OrbitCensus:
    k: int
    q: int
    d: int
    orbits: Dict[int, Orbit] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(o.count for o in self.orbits.values())

    def orbit_sum(self) -> int:
        """sum_C s_C mu_C^2; equals the motion sweep sum of |w|^{k+1}."""
        return sum(o.stabilizer * o.count ** 2 for o in self.orbits.values())

    def by_distance_matrix(self) -> Dict[DistanceMatrix, List[Orbit]]:
        classes: Dict[DistanceMatrix, List[Orbit]] = {}
        for orbit in sorted(self.orbits.values(), key=lambda o: o.representative):
            classes.setdefault(orbit.distance_matrix, []).append(orbit)
        return classes

    def split_classes(self) -> List[DistanceMatrix]:
        """Distance matrices realised by more than one orbit."""
        return sorted(dm for dm, orbits in self.by_distance_matrix().items() if len(orbits) > 1)

    def distance_matrix_sum(self) -> int:
        """sum_D s(D) mu(D)^2 with s(D) from the lexicographically first tuple of D."""
        total = 0
        for orbits in self.by_distance_matrix().values():
            mu = sum(o.count for o in orbits)
            total += orbits[0].stabilizer * mu * mu
        return total

    def stabilizer_violations(self) -> List[Orbit]:
        """Orbits with s_C > |O(d - rank)| among those where the bound applies."""
        return [o for o in self.checkable_orbits() if o.stabilizer > o.stabilizer_bound(self.q, self.d)]

    def checkable_orbits(self) -> List[Orbit]:
        # the complement of a nondegenerate span is a standard space only up to dimension 1
        return [
            o for o in self.orbits.values()
            if o.nondegenerate_span and (o.rank == 0 or self.d - o.rank <= 1)
        ]


def congruence_orbits(pointset: PointSet, k: int, threads: Optional[int] = None) -> OrbitCensus:
    """
    Group all (k+1)-tuples of E by rigid-motion orbit. The key of a tuple is the
    least encoding of theta(x_i - x_0), i = 1..k, over theta in O(d); the
    stabilizer counts the theta that fix every difference.
    """
    q, d, n = pointset.q, pointset.d, len(pointset)
    if k < 1 or k > d:
        raise UsageError(f"orbit census needs 1 <= k <= d, got k={k}, d={d}")
    group = group_array(q, d)
    work = n ** (k + 1) * len(group)
    if work > settings.CENSUS_TUPLE_CAP:
        raise CapExceededError("orbit census work", work, settings.CENSUS_TUPLE_CAP)

    arr = pointset.array
    weights = q ** np.arange(k * d, dtype=np.int64)
    identity = int(np.flatnonzero((group == np.eye(d, dtype=np.int64)).all(axis=(1, 2)))[0])
    threads = settings.THREADS if threads is None else threads

    rest = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64).reshape(-1, k)

    def sweep(firsts: List[int]) -> Dict[int, Tuple[int, int, Tuple[int, ...]]]:
        found: Dict[int, Tuple[int, int, Tuple[int, ...]]] = {}
        for first in firsts:
            diffs = (arr[rest] - arr[first]) % q                       # (T, k, d)
            images = np.einsum("gab,tkb->tgka", group, diffs) % q      # (T, G, k, d)
            codes = images.reshape(len(rest), len(group), k * d) @ weights
            keys = codes.min(axis=1)
            stabs = (codes == codes[:, identity:identity + 1]).sum(axis=1)
            uniq, first_pos, hits = np.unique(keys, return_index=True, return_counts=True)
            for key, pos, hit in zip(uniq.tolist(), first_pos.tolist(), hits.tolist()):
                if key in found:
                    count, stab, rep = found[key]
                    found[key] = (count + hit, stab, rep)
                else:
                    found[key] = (hit, int(stabs[pos]), (first,) + tuple(rest[pos].tolist()))
        return found

    def merge(left, right):
        for key, (count, stab, rep) in right.items():
            if key in left:
                left[key] = (left[key][0] + count, left[key][1], left[key][2])
            else:
                left[key] = (count, stab, rep)
        return left

    found = chunked_map_reduce(list(range(n)), sweep, merge, {}, threads)
    points = pointset.points
    orbits = {}
    for key, (count, stab, rep) in sorted(found.items()):
        pts = [points[i] for i in rep]
        diffs = [tuple((a - b) % q for a, b in zip(p, pts[0])) for p in pts[1:]]
        gram = [[sum(a * b for a, b in zip(u, v)) % q for v in diffs] for u in diffs]
        rank = rank_mod(diffs, q)
        orbits[key] = Orbit(
            count=count,
            stabilizer=stab,
            representative=rep,
            distance_matrix=DistanceMatrix.of(pts, q),
            rank=rank,
            nondegenerate_span=rank_mod(gram, q) == rank,
        )
    logger.info("orbit census q=%d d=%d |E|=%d k=%d: %d orbits", q, d, n, k, len(orbits))
    return OrbitCensus(k, q, d, orbits)
