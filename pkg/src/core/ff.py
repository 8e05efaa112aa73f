"""
Exact arithmetic in the prime field F_q and enumeration of PG(q, m).

Elements are residues of an odd prime q. Hot loops elsewhere in the toolkit work
on raw ``int`` residues; :class:`FieldElement` is the checked value type used at
API boundaries.
"""
import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from src.core.errors import FieldError


@functools.lru_cache(maxsize=None)
def is_odd_prime(q: int) -> bool:
    """Trial-division primality test restricted to odd primes."""
    if q < 3 or q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def require_odd_prime(q: int) -> int:
    if not isinstance(q, int) or isinstance(q, bool) or not is_odd_prime(q):
        raise FieldError(f"modulus must be an odd prime, got {q!r}")
    return q


def inverse_mod(a: int, q: int) -> int:
    """Inverse of ``a`` modulo ``q`` by the extended Euclidean algorithm."""
    a %= q
    if a == 0:
        raise FieldError("division by zero in F_%d" % q)
    old_r, r = a, q
    old_s, s = 1, 0
    while r:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
    return old_s % q


@dataclass(frozen=True, order=True)
class FieldElement:
    """A residue in [0, q) of an odd prime q."""

    value: int
    q: int

    def __post_init__(self):
        require_odd_prime(self.q)
        if not 0 <= self.value < self.q:
            raise FieldError(f"residue {self.value} outside [0, {self.q})")

    @classmethod
    def of(cls, value: int, q: int) -> "FieldElement":
        require_odd_prime(q)
        return cls(value % q, q)

    def _coerce(self, other: Union["FieldElement", int]) -> Optional[int]:
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise FieldError(f"mixed moduli {self.q} and {other.q}")
            return other.value
        if isinstance(other, int):
            return other % self.q
        return None

    def _wrap(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self.q)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(self.value * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(self.value * inverse_mod(o, self.q))

    def __neg__(self):
        return self._wrap(-self.value)

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse_mod(self.value, self.q), self.q)

    def is_square(self) -> bool:
        """Euler's criterion; zero counts as a square."""
        return self.value == 0 or pow(self.value, (self.q - 1) // 2, self.q) == 1


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply one of ``add``, ``sub``, ``mul``, ``div`` to two elements."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise FieldError(f"unknown field operation {op!r}") from None
    return fn(a, b)


@dataclass(frozen=True, order=True)
class ProjPoint:
    """Canonical representative of a point of PG(q, m): leading nonzero is 1."""

    coords: Tuple[int, ...]
    q: int

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def elements(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(c, self.q) for c in self.coords)

    def dot(self, other: "ProjPoint") -> int:
        return dot_mod(self.coords, other.coords, self.q)


Vector = Sequence[Union[int, FieldElement]]


def _residues(v: Vector, q: int) -> Tuple[int, ...]:
    return tuple(int(c) % q for c in v)


def canonical_tuple(v: Sequence[int], q: int) -> Tuple[int, ...]:
    """Leading-one normalisation on raw residues."""
    for c in v:
        if c % q:
            scale = inverse_mod(c, q)
            return tuple((x * scale) % q for x in v)
    raise FieldError("the zero vector has no projective point")


def normalize_projective(v: Vector, q: int) -> ProjPoint:
    require_odd_prime(q)
    return ProjPoint(canonical_tuple(_residues(v, q), q), q)


def pg_size(q: int, m: int) -> int:
    return (q**m - 1) // (q - 1)


def enumerate_pg(q: int, m: int) -> List[ProjPoint]:
    """All points of PG(q, m) in lexicographic order of their canonical coordinates."""
    require_odd_prime(q)
    if m < 2:
        raise FieldError(f"projective space needs m >= 2, got {m}")
    points = []
    for lead in range(m):
        for tail in itertools.product(range(q), repeat=m - lead - 1):
            points.append(ProjPoint((0,) * lead + (1,) + tail, q))
    points.sort()
    return points


def dot_mod(x: Sequence[int], y: Sequence[int], q: int) -> int:
    if len(x) != len(y):
        raise FieldError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return sum(a * b for a, b in zip(x, y)) % q


def rank_mod(rows: Iterable[Sequence[int]], q: int) -> int:
    """Rank over F_q by Gaussian elimination."""
    matrix = [[c % q for c in row] for row in rows]
    if not matrix:
        return 0
    rank = 0
    cols = len(matrix[0])
    for col in range(cols):
        pivot = next((r for r in range(rank, len(matrix)) if matrix[r][col]), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        inv = inverse_mod(matrix[rank][col], q)
        matrix[rank] = [(c * inv) % q for c in matrix[rank]]
        for r in range(len(matrix)):
            if r != rank and matrix[r][col]:
                factor = matrix[r][col]
                matrix[r] = [(a - factor * b) % q for a, b in zip(matrix[r], matrix[rank])]
        rank += 1
        if rank == len(matrix):
            break
    return rank
