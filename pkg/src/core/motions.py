"""
Orthogonal groups O(n, F_q), plane reflections, and rigid-motion sweeps.

A rigid motion is a pair (theta, z) acting by x -> theta(x) + z. Sweeps run
theta in the outer loop and z in the inner loop; per-theta partial sums are
merged by integer addition, so results do not depend on the thread count.
"""
import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import settings
from src.core.errors import CapExceededError, FieldError
from src.core.ff import require_odd_prime
from src.core.pointset import Coords, PointSet
from src.utils.parallel import chunked_map_reduce

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]


def _matmul(a: Matrix, b: Matrix, q: int) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(n)) % q for j in range(n))
        for i in range(n)
    )


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def _identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _det(a: Matrix, q: int) -> int:
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0] % q
    total = 0
    for j in range(n):
        minor = tuple(row[:j] + row[j + 1:] for row in a[1:])
        total += (-1) ** j * a[0][j] * _det(minor, q)
    return total % q


@dataclass(frozen=True)
class OrthMatrix:
    """A matrix over F_q with theta^T theta = I, checked at construction."""

    entries: Matrix
    q: int

    def __post_init__(self):
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise FieldError("orthogonal matrix must be square")
        if _matmul(_transpose(self.entries), self.entries, self.q) != _identity(n):
            raise FieldError(f"matrix {self.entries} is not orthogonal over F_{self.q}")

    @classmethod
    def identity(cls, n: int, q: int) -> "OrthMatrix":
        return cls(_identity(n), q)

    @property
    def n(self) -> int:
        return len(self.entries)

    def apply(self, x: Sequence[int]) -> Coords:
        return tuple(sum(r * c for r, c in zip(row, x)) % self.q for row in self.entries)

    def compose(self, other: "OrthMatrix") -> "OrthMatrix":
        return OrthMatrix(_matmul(self.entries, other.entries, self.q), self.q)

    def inverse(self) -> "OrthMatrix":
        return OrthMatrix(_transpose(self.entries), self.q)

    def det(self) -> int:
        return _det(self.entries, self.q)

    def to_list(self) -> List[List[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class Motion:
    theta: OrthMatrix
    z: Coords

    def apply(self, x: Sequence[int]) -> Coords:
        q = self.theta.q
        return tuple((a + b) % q for a, b in zip(self.theta.apply(x), self.z))


@dataclass(frozen=True)
class Reflection2D:
    """R_u(x) = R(x - u) + u with R = [[a, b], [b, -a]] and a^2 + b^2 = 1."""

    a: int
    b: int
    u: Coords
    q: int

    def __post_init__(self):
        if (self.a * self.a + self.b * self.b) % self.q != 1:
            raise FieldError(f"({self.a}, {self.b}) is not on the unit circle of F_{self.q}")

    @property
    def matrix(self) -> Matrix:
        return ((self.a % self.q, self.b % self.q), (self.b % self.q, (-self.a) % self.q))

    @property
    def translation(self) -> Coords:
        """t with R_u(x) = R x + t, namely (I - R) u."""
        ru = self.apply_linear(self.u)
        return tuple((u - r) % self.q for u, r in zip(self.u, ru))

    def apply_linear(self, x: Sequence[int]) -> Coords:
        (r00, r01), (r10, r11) = self.matrix
        return ((r00 * x[0] + r01 * x[1]) % self.q, (r10 * x[0] + r11 * x[1]) % self.q)

    def apply(self, x: Sequence[int]) -> Coords:
        shifted = tuple((c - u) % self.q for c, u in zip(x, self.u))
        image = self.apply_linear(shifted)
        return tuple((c + u) % self.q for c, u in zip(image, self.u))


def apply_reflection(r: Reflection2D, x: Sequence[int]) -> Coords:
    if len(x) != 2:
        raise FieldError("reflections act on F_q^2")
    return r.apply(x)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def unit_sphere(q: int, n: int) -> Tuple[Coords, ...]:
    """All v in F_q^n with ||v|| = 1, lexicographic."""
    return tuple(
        v for v in itertools.product(range(q), repeat=n)
        if sum(c * c for c in v) % q == 1
    )


def unit_circle(q: int) -> List[Coords]:
    require_odd_prime(q)
    circle = list(unit_sphere(q, 2))
    expected = q + 1 if q % 4 == 3 else q - 1
    assert len(circle) == expected, f"unit circle of F_{q} has {len(circle)} points"
    return circle


def _check_orthogonal_cap(q: int, n: int, allow_n4: Optional[bool]) -> None:
    if n > 4 or (n == 4 and not (settings.ALLOW_N4 if allow_n4 is None else allow_n4)):
        raise CapExceededError("orthogonal enumeration dimension", n, 3)
    if n >= 3 and q > settings.ORTHOGONAL_Q_CAP_N3:
        raise CapExceededError(f"orthogonal enumeration q for n={n}", q, settings.ORTHOGONAL_Q_CAP_N3)


@functools.lru_cache(maxsize=None)
def _orthogonal_columns(q: int, n: int) -> Tuple[Tuple[Coords, ...], ...]:
    sphere = unit_sphere(q, n)
    found: List[Tuple[Coords, ...]] = []

    def extend(cols: Tuple[Coords, ...]) -> None:
        if len(cols) == n:
            found.append(cols)
            return
        for v in sphere:
            if all(sum(a * b for a, b in zip(v, c)) % q == 0 for c in cols):
                extend(cols + (v,))

    extend(())
    return tuple(found)


def enumerate_orthogonal(q: int, n: int, allow_n4: Optional[bool] = None) -> List[OrthMatrix]:
    """
    All theta in O(n, F_q), by backtracking over orthonormal column tuples:
    each new column has norm 1 and is orthogonal to the columns chosen so far.
    """
    require_odd_prime(q)
    if n < 0:
        raise FieldError("dimension must be non-negative")
    if n == 0:
        return [OrthMatrix((), q)]
    _check_orthogonal_cap(q, n, allow_n4)
    group = [OrthMatrix(_transpose(cols), q) for cols in _orthogonal_columns(q, n)]
    logger.debug("|O(%d, F_%d)| = %d", n, q, len(group))
    return group


@functools.lru_cache(maxsize=None)
def orthogonal_order(q: int, n: int) -> int:
    """Enumerated |O(n, F_q)|, with |O(0)| = 1."""
    if n <= 0:
        return 1
    return len(enumerate_orthogonal(q, n))


@functools.lru_cache(maxsize=None)
def group_array(q: int, n: int) -> np.ndarray:
    """O(n, F_q) stacked as an array of shape (|O|, n, n)."""
    return np.array([g.entries for g in enumerate_orthogonal(q, n)], dtype=np.int64).reshape(-1, n, n)


def reflection_maps(q: int) -> List[Reflection2D]:
    """One Reflection2D per distinct map x -> Rx + (I - R)u; q(q+1) or q(q-1) of them."""
    distinct: Dict[Tuple[int, int, Coords], Reflection2D] = {}
    for a, b in unit_circle(q):
        for u in itertools.product(range(q), repeat=2):
            r = Reflection2D(a, b, u, q)
            distinct.setdefault((a, b, r.translation), r)
    return list(distinct.values())


# ---------------------------------------------------------------------------
# Motion sweeps
# ---------------------------------------------------------------------------

def w_count(pointset: PointSet, motion: Motion) -> int:
    """|{(u, v) in E^2 : theta(u) + z = v}| = |E intersect m(E)|."""
    members = set(pointset.points)
    return sum(1 for u in pointset.points if motion.apply(u) in members)


def _encode(arr: np.ndarray, q: int) -> np.ndarray:
    weights = q ** np.arange(arr.shape[-1], dtype=np.int64)
    return (arr * weights).sum(axis=-1)


def w_profile(pointset: PointSet, theta: np.ndarray) -> np.ndarray:
    """f(z) = |w_theta(z)| for every z in F_q^d, indexed by the base-q code of z."""
    q, d = pointset.q, pointset.d
    arr = pointset.array
    images = (arr @ theta.T) % q
    z = (arr[None, :, :] - images[:, None, :]) % q
    return np.bincount(_encode(z, q).ravel(), minlength=q**d)


@dataclass
class MotionStatistics:
    k: int
    s1: int
    s2: int
    max_w: int
    motions: int
    group_order: int
    mass_identity_holds: bool
    profiles: Optional[List[np.ndarray]] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "s1": self.s1,
            "s2": self.s2,
            "max_w": self.max_w,
            "motions": self.motions,
            "group_order": self.group_order,
            "mass_identity_holds": self.mass_identity_holds,
        }


def check_motion_sweep_cap(pointset: PointSet) -> None:
    q, d = pointset.q, pointset.d
    if d == 2:
        q_limit = 13
    elif d == 3:
        q_limit = 7
    else:
        raise CapExceededError("motion sweep dimension", d, 3)
    if q > q_limit:
        raise CapExceededError(f"motion sweep q for d={d}", q, q_limit)
    work = orthogonal_order(q, d) * len(pointset) ** 2
    if work > settings.MOTION_SWEEP_CAP:
        raise CapExceededError("motion sweep work", work, settings.MOTION_SWEEP_CAP)


def motion_statistics(
    pointset: PointSet,
    k: int,
    keep_profiles: bool = False,
    threads: Optional[int] = None,
) -> MotionStatistics:
    """S1 = sum |w_theta(z)|^2 and S2 = sum |w_theta(z)|^{k+1} over every motion."""
    check_motion_sweep_cap(pointset)
    q, d = pointset.q, pointset.d
    group = group_array(q, d)
    n_sq = len(pointset) ** 2
    threads = settings.THREADS if threads is None else threads

    def sweep(indices: List[int]):
        s1 = s2 = max_w = 0
        mass_ok = True
        profiles = []
        for i in indices:
            f = w_profile(pointset, group[i])
            nz = [int(v) for v in f[f > 0]]
            s1 += sum(v * v for v in nz)
            s2 += sum(v ** (k + 1) for v in nz)
            max_w = max(max_w, max(nz))
            mass_ok = mass_ok and sum(nz) == n_sq
            if keep_profiles:
                profiles.append(f)
        return s1, s2, max_w, mass_ok, profiles

    def merge(left, right):
        return (
            left[0] + right[0],
            left[1] + right[1],
            max(left[2], right[2]),
            left[3] and right[3],
            left[4] + right[4],
        )

    s1, s2, max_w, mass_ok, profiles = chunked_map_reduce(
        list(range(len(group))), sweep, merge, (0, 0, 0, True, []), threads
    )
    logger.info("motion sweep q=%d d=%d |E|=%d: S1=%d S2=%d", q, d, len(pointset), s1, s2)
    return MotionStatistics(
        k=k,
        s1=s1,
        s2=s2,
        max_w=max_w,
        motions=len(group) * q**d,
        group_order=len(group),
        mass_identity_holds=mass_ok,
        profiles=profiles if keep_profiles else None,
    )


def stabilizer_size(simplex: Sequence[Sequence[int]], q: int) -> int:
    """#{(theta, z) : theta(x_i) + z = x_i for all i}, by a full motion sweep."""
    points = [tuple(p) for p in simplex]
    d = len(points[0])
    if d not in (2, 3):
        raise CapExceededError("stabilizer sweep dimension", d, 3)
    count = 0
    for theta in enumerate_orthogonal(q, d):
        images = [theta.apply(p) for p in points]
        for z in itertools.product(range(q), repeat=d):
            if all(
                tuple((a + b) % q for a, b in zip(img, z)) == p
                for img, p in zip(images, points)
            ):
                count += 1
    return count
