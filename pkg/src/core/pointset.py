"""
Point sets in F_q^d and their distance statistics.

Distances are the finite-field quadratic form ||x - y|| = sum (x_i - y_i)^2 mod q.
Every statistic here counts ORDERED pairs and includes the diagonal pairs
(x, x), so that sum_t nu_E(t) = |E|^2.
"""
import functools
import itertools
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config.settings import settings
from src.core.errors import FieldError, PointSetError
from src.core.ff import FieldElement, canonical_tuple, require_odd_prime

logger = logging.getLogger(__name__)

Coords = Tuple[int, ...]

_HEADER = re.compile(r"^#\s*q\s*=\s*(\d+)\s+d\s*=\s*(\d+)\s*$")


def _as_coordinate(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"coordinate {value!r} is not an integer")
    return int(value)


@dataclass(frozen=True, order=True)
class Point:
    coords: Coords
    q: int

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def elements(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(c, self.q) for c in self.coords)

    def __sub__(self, other: "Point") -> "Point":
        _same_shape(self.coords, other.coords)
        return Point(tuple((a - b) % self.q for a, b in zip(self.coords, other.coords)), self.q)


@dataclass
class PointSet:
    """Either an explicit list of distinct points or a Cartesian product A_1 x ... x A_d."""

    q: int
    d: int
    explicit: Optional[Tuple[Coords, ...]] = None
    sets: Optional[Tuple[Tuple[int, ...], ...]] = None

    @classmethod
    def from_points(cls, q: int, points: Iterable[Sequence[int]], d: Optional[int] = None) -> "PointSet":
        require_odd_prime(q)
        pts = tuple(tuple(int(c) for c in p) for p in points)
        if not pts:
            raise PointSetError("point set is empty")
        d = d if d is not None else len(pts[0])
        if d < 1:
            raise PointSetError("dimension must be at least 1")
        seen = set()
        for p in pts:
            if len(p) != d:
                raise PointSetError(f"point {p} has arity {len(p)}, expected {d}")
            if any(not 0 <= c < q for c in p):
                raise PointSetError(f"point {p} has a coordinate outside [0, {q})")
            if p in seen:
                raise PointSetError(f"duplicate point {p}")
            seen.add(p)
        return cls(q=q, d=d, explicit=pts)

    @classmethod
    def from_product(cls, q: int, sets: Sequence[Sequence[int]]) -> "PointSet":
        require_odd_prime(q)
        if isinstance(sets, (str, bytes)) or not isinstance(sets, (list, tuple)):
            raise PointSetError("product sets must be a list of coordinate lists")
        if not sets:
            raise PointSetError("product needs at least one coordinate set")
        cleaned = []
        for i, a in enumerate(sets):
            if isinstance(a, (str, bytes)) or not isinstance(a, (list, tuple, range)):
                raise PointSetError(f"coordinate set A_{i + 1} must be a list, got {a!r}")
            try:
                a = tuple(_as_coordinate(c) for c in a)
            except (TypeError, ValueError) as e:
                raise PointSetError(f"coordinate set A_{i + 1}: {e}") from e
            if not a:
                raise PointSetError(f"coordinate set A_{i + 1} is empty")
            if len(set(a)) != len(a):
                raise PointSetError(f"coordinate set A_{i + 1} has repeated elements")
            if any(not 0 <= c < q for c in a):
                raise PointSetError(f"coordinate set A_{i + 1} has an element outside [0, {q})")
            cleaned.append(tuple(sorted(a)))
        return cls(q=q, d=len(cleaned), sets=tuple(cleaned))

    @classmethod
    def grid(cls, q: int, d: int) -> "PointSet":
        return cls.from_product(q, [range(q)] * d)

    @property
    def is_product(self) -> bool:
        return self.sets is not None

    def __len__(self) -> int:
        if self.sets is not None:
            return math.prod(len(a) for a in self.sets)
        return len(self.explicit)

    @functools.cached_property
    def points(self) -> Tuple[Coords, ...]:
        """Materialised points; products enumerate in lexicographic order."""
        if self.sets is not None:
            return tuple(itertools.product(*self.sets))
        return self.explicit

    @functools.cached_property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(len(self), self.d)

    def permuted(self, order: Sequence[int]) -> "PointSet":
        """Same set with coordinates reordered."""
        if self.sets is not None:
            return PointSet.from_product(self.q, [self.sets[i] for i in order])
        return PointSet.from_points(self.q, [tuple(p[i] for i in order) for p in self.points])

    def mapped(self, fn) -> "PointSet":
        return PointSet.from_points(self.q, [fn(p) for p in self.points], d=self.d)

    def describe(self) -> Dict[str, object]:
        info: Dict[str, object] = {"q": self.q, "d": self.d, "size": len(self)}
        if self.sets is not None:
            info["kind"] = "product"
            info["sets"] = [list(a) for a in self.sets]
        else:
            info["kind"] = "explicit"
        return info


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def parse_pointset(text: str) -> PointSet:
    """Parse either the CSV format (with '# q=<q> d=<d>' header) or the JSON product format."""
    stripped = text.strip()
    if not stripped:
        raise PointSetError("empty input")
    if stripped.startswith("{"):
        try:
            entry = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise PointSetError(f"malformed JSON: {e}") from e
        if "q" not in entry or "sets" not in entry:
            raise PointSetError("product JSON needs 'q' and 'sets'")
        try:
            q = _as_coordinate(entry["q"])
        except TypeError as e:
            raise PointSetError(f"product JSON field q: {e}") from e
        try:
            return PointSet.from_product(q, entry["sets"])
        except FieldError as e:
            raise PointSetError(str(e)) from e

    lines = [ln.strip() for ln in stripped.splitlines()]
    match = _HEADER.match(lines[0])
    if not match:
        raise PointSetError("CSV input must start with a '# q=<q> d=<d>' header")
    q, d = int(match.group(1)), int(match.group(2))
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        try:
            points.append(tuple(int(tok) for tok in line.split(",")))
        except ValueError:
            raise PointSetError(f"line {lineno}: non-integer field in {line!r}") from None
    try:
        return PointSet.from_points(q, points, d=d)
    except FieldError as e:
        raise PointSetError(str(e)) from e


def load_pointset(source: Union[str, Path]) -> PointSet:
    """Load a point set from a file path."""
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PointSetError(f"cannot read {path}: {e}") from e
    pointset = parse_pointset(text)
    logger.info("loaded %s point set from %s: q=%d d=%d |E|=%d",
                "product" if pointset.is_product else "explicit", path,
                pointset.q, pointset.d, len(pointset))
    return pointset


def dump_pointset_csv(pointset: PointSet) -> str:
    lines = [f"# q={pointset.q} d={pointset.d}"]
    lines.extend(",".join(str(c) for c in p) for p in pointset.points)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Norms and distances
# ---------------------------------------------------------------------------

def _same_shape(x: Sequence[int], y: Sequence[int]) -> None:
    if len(x) != len(y):
        raise FieldError(f"dimension mismatch: {len(x)} vs {len(y)}")


def _coords(x: Union[Point, Sequence[int]]) -> Coords:
    return x.coords if isinstance(x, Point) else tuple(int(c) for c in x)


def norm(x: Union[Point, Sequence[int]], q: int) -> int:
    return sum(c * c for c in _coords(x)) % q


def distance(x: Union[Point, Sequence[int]], y: Union[Point, Sequence[int]], q: int) -> int:
    cx, cy = _coords(x), _coords(y)
    _same_shape(cx, cy)
    return sum((a - b) * (a - b) for a, b in zip(cx, cy)) % q


def pairwise_distances(pointset: PointSet) -> np.ndarray:
    """|E| x |E| matrix of distances, rows and columns in ``pointset.points`` order."""
    arr = pointset.array
    diff = arr[:, None, :] - arr[None, :, :]
    return (diff * diff).sum(axis=-1) % pointset.q


# ---------------------------------------------------------------------------
# Distance distribution
# ---------------------------------------------------------------------------

@dataclass
class DistanceDistribution:
    """nu_E(t): number of ordered pairs (x, y) in E^2 with ||x - y|| = t."""

    q: int
    counts: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_array(cls, q: int, values: np.ndarray) -> "DistanceDistribution":
        return cls(q, {t: int(v) for t, v in enumerate(values) if v})

    def __getitem__(self, t: int) -> int:
        return self.counts.get(t % self.q, 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def support(self) -> List[int]:
        return sorted(self.counts)

    def as_array(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        for t, v in self.counts.items():
            out[t] = v
        return out

    def to_dict(self) -> Dict[str, int]:
        return {str(t): self.counts[t] for t in sorted(self.counts)}


def distance_distribution_direct(pointset: PointSet) -> DistanceDistribution:
    """Histogram over all ordered pairs of the materialised set."""
    dist = pairwise_distances(pointset)
    return DistanceDistribution.from_array(pointset.q, np.bincount(dist.ravel(), minlength=pointset.q))


def _cyclic_convolve(a: List[int], b: List[int], q: int) -> List[int]:
    out = [0] * q
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[(i + j) % q] += x * y
    return out


def distance_distribution_product(sets: Sequence[Sequence[int]], q: int) -> DistanceDistribution:
    """
    nu_E for E = A_1 x ... x A_d as the additive convolution over F_q of the
    per-coordinate squared-difference histograms.
    """
    require_odd_prime(q)
    total = [1] + [0] * (q - 1)
    for a in sets:
        hist = [0] * q
        for x in a:
            for y in a:
                hist[((x - y) * (x - y)) % q] += 1
        total = _cyclic_convolve(total, hist, q)
    return DistanceDistribution(q, {t: v for t, v in enumerate(total) if v})


def distance_distribution(pointset: PointSet) -> DistanceDistribution:
    if pointset.is_product:
        return distance_distribution_product(pointset.sets, pointset.q)
    return distance_distribution_direct(pointset)


def quadruple_count(dist: DistanceDistribution, nonzero_only: bool = False) -> int:
    """W = sum_t nu_E(t)^2, optionally restricted to t in F_q^*."""
    return sum(v * v for t, v in dist.counts.items() if not (nonzero_only and t == 0))


# ---------------------------------------------------------------------------
# Hinges
# ---------------------------------------------------------------------------

def circle_counts(pointset: PointSet) -> np.ndarray:
    """Row p, column t: number of points of E at distance t from p."""
    dist = pairwise_distances(pointset)
    q = pointset.q
    offsets = np.arange(len(pointset))[:, None] * q
    flat = np.bincount((dist + offsets).ravel(), minlength=len(pointset) * q)
    return flat.reshape(len(pointset), q)


@dataclass
class HingeCounts:
    """H_lambda(E) for lambda in F_q^*; degenerate hinges with q1 = q2 are included."""

    q: int
    counts: Dict[int, int]
    cross_checked: bool

    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, lam: int) -> int:
        return self.counts.get(lam % self.q, 0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "counts": {str(t): self.counts[t] for t in sorted(self.counts)},
            "total": self.total(),
            "cross_checked": self.cross_checked,
        }


def _hinges_by_triple_loop(pointset: PointSet) -> Dict[int, int]:
    q = pointset.q
    pts = pointset.points
    counts: Dict[int, int] = {}
    for p in pts:
        for q1 in pts:
            lam = distance(p, q1, q)
            if lam == 0:
                continue
            for q2 in pts:
                if distance(p, q2, q) == lam:
                    counts[lam] = counts.get(lam, 0) + 1
    return counts


def hinge_counts(pointset: PointSet, cross_check: Optional[bool] = None) -> HingeCounts:
    """
    H_lambda(E) = sum_p (x_p^lambda)^2. The triple-loop definition is evaluated
    as a cross-check whenever |E|^3 is within the configured cap.
    """
    x = circle_counts(pointset)
    squares = (x * x).sum(axis=0)
    counts = {lam: int(squares[lam]) for lam in range(1, pointset.q) if squares[lam]}

    if cross_check is None:
        cross_check = len(pointset) ** 3 <= settings.HINGE_CROSSCHECK_CAP
    if cross_check:
        brute = _hinges_by_triple_loop(pointset)
        if brute != counts:
            raise RuntimeError(f"hinge identity broken: {brute} != {counts}")
    return HingeCounts(pointset.q, counts, bool(cross_check))


# ---------------------------------------------------------------------------
# Bisector lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Line:
    """cx + dy + e = 0 with (c, d, e) scaled so the leading nonzero coefficient is 1."""

    c: int
    d: int
    e: int
    q: int

    @classmethod
    def from_coefficients(cls, c: int, d: int, e: int, q: int) -> "Line":
        if c % q == 0 and d % q == 0:
            raise FieldError("a line needs (c, d) != (0, 0)")
        cc, dd, ee = canonical_tuple((c % q, d % q, e % q), q)
        return cls(cc, dd, ee, q)

    @property
    def coefficients(self) -> Coords:
        return (self.c, self.d, self.e)

    def contains(self, point: Union[Point, Sequence[int]]) -> bool:
        x, y = _coords(point)
        return (self.c * x + self.d * y + self.e) % self.q == 0

    def points(self) -> List[Coords]:
        return [(x, y) for x in range(self.q) for y in range(self.q) if self.contains((x, y))]


def bisector_line(q1: Union[Point, Sequence[int]], q2: Union[Point, Sequence[int]], q: int) -> Line:
    """The line 2(q2 - q1) . x = ||q2|| - ||q1|| of points equidistant from q1 and q2."""
    a, b = _coords(q1), _coords(q2)
    _same_shape(a, b)
    if len(a) != 2:
        raise FieldError("bisector lines are defined in the plane only")
    if a == b:
        raise FieldError("bisector of a point with itself is the whole plane")
    c = 2 * (b[0] - a[0])
    d = 2 * (b[1] - a[1])
    e = -(norm(b, q) - norm(a, q))
    return Line.from_coefficients(c, d, e, q)


# ---------------------------------------------------------------------------
# Isotropic diagnostics
# ---------------------------------------------------------------------------

@dataclass
class IsotropicReport:
    count: int
    sample: List[Tuple[Coords, Coords]]
    q_mod_4: int
    size: int
    minus_one_is_square: bool

    @property
    def precondition_holds(self) -> bool:
        """True when nu_E(0) = |E|, i.e. no two distinct points are at distance 0."""
        return self.count == 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "count": self.count,
            "sample": [[list(a), list(b)] for a, b in self.sample],
            "q_mod_4": self.q_mod_4,
            "precondition_holds": self.precondition_holds,
            "minus_one_is_square": self.minus_one_is_square,
        }


def isotropic_report(pointset: PointSet, sample_size: int = 5) -> IsotropicReport:
    """Count ordered pairs x != y with ||x - y|| = 0."""
    dist = pairwise_distances(pointset)
    mask = dist == 0
    np.fill_diagonal(mask, False)
    rows, cols = np.nonzero(mask)
    pts = pointset.points
    sample = [(pts[i], pts[j]) for i, j in zip(rows[:sample_size], cols[:sample_size])]
    minus_one = FieldElement(pointset.q - 1, pointset.q)
    return IsotropicReport(int(mask.sum()), sample, pointset.q % 4, len(pointset), minus_one.is_square())


def strip_isotropic(pointset: PointSet) -> PointSet:
    """
    Remove points greedily until no two remaining points are at distance 0;
    the point in the most isotropic pairs goes first, ties to the lowest index.
    """
    dist = pairwise_distances(pointset)
    mask = dist == 0
    np.fill_diagonal(mask, False)
    alive = np.ones(len(pointset), dtype=bool)
    while True:
        live = mask & alive[:, None] & alive[None, :]
        degree = live.sum(axis=1)
        if not degree.any():
            break
        alive[int(np.argmax(degree))] = False
    kept = [p for p, keep in zip(pointset.points, alive) if keep]
    logger.debug("strip_isotropic kept %d of %d points", len(kept), len(pointset))
    return PointSet.from_points(pointset.q, kept, d=pointset.d)


# ---------------------------------------------------------------------------
# Seeded random sets
# ---------------------------------------------------------------------------

def random_pointset(q: int, d: int, size: int, seed: int) -> PointSet:
    """``size`` distinct points of F_q^d drawn uniformly without replacement."""
    require_odd_prime(q)
    if not 1 <= size <= q**d:
        raise PointSetError(f"cannot draw {size} distinct points from F_{q}^{d}")
    rng = np.random.default_rng(seed)
    codes = np.sort(rng.choice(q**d, size=size, replace=False))
    points = [tuple(int(c) // q**i % q for i in range(d - 1, -1, -1)) for c in codes]
    return PointSet.from_points(q, points, d=d)


def random_product(q: int, d: int, seed: int, min_size: int = 1) -> PointSet:
    """A_1 x ... x A_d with each |A_i| uniform in [min_size, q] and A_i uniform of that size."""
    require_odd_prime(q)
    rng = np.random.default_rng(seed)
    sets = []
    for _ in range(d):
        size = int(rng.integers(min_size, q + 1))
        sets.append(sorted(int(c) for c in rng.choice(q, size=size, replace=False)))
    return PointSet.from_product(q, sets)
