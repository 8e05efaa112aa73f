"""
Size thresholds of the census theorems, as exact exponent arithmetic.

Every "|E| >> q^a" hypothesis is compared as |E|^den >= q^num for the
reduced exponent a = num/den, with the implicit constant taken as 1.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Any, Dict, List, Optional, Sequence

from src.core.errors import UsageError
from src.verification.census import Census

logger = logging.getLogger(__name__)


def at_least_power(size: int, q: int, exponent: Fraction) -> bool:
    """size >= q^exponent, exactly."""
    exponent = Fraction(exponent)
    return size**exponent.denominator >= q**exponent.numerator


def power_equals(size: int, q: int, exponent: Fraction) -> bool:
    exponent = Fraction(exponent)
    return size**exponent.denominator == q**exponent.numerator


@dataclass
class ThresholdItem:
    name: str
    exponent: Optional[Fraction]
    satisfied: bool
    boundary: bool = False
    applicable: bool = True
    note: Optional[str] = None
    values: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "exponent": self.exponent,
            "satisfied": self.satisfied,
            "boundary": self.boundary,
            "applicable": self.applicable,
            "note": self.note,
            "values": self.values,
        }


@dataclass
class ThresholdReport:
    q: int
    d: int
    k: int
    size: int
    sizes: Optional[List[int]]
    items: List[ThresholdItem]
    target_classes: int
    measured_classes: Optional[int] = None

    def item(self, name: str) -> ThresholdItem:
        return next(i for i in self.items if i.name == name)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "q": self.q,
            "d": self.d,
            "k": self.k,
            "size": self.size,
            "sizes": self.sizes,
            "items": [i.to_dict() for i in self.items],
            "target_classes": self.target_classes,
        }
        if self.measured_classes is not None:
            out["measured_classes"] = self.measured_classes
            out["measured_fraction"] = Fraction(self.measured_classes, self.target_classes)
        return out


def general_exponent(d: int, k: int) -> Fraction:
    """d - (d - 1)/(k + 1)."""
    return d - Fraction(d - 1, k + 1)


def power_set_exponent(d: int, k: int) -> Fraction:
    """kd / (k + 1 - 1/d)."""
    return Fraction(k * d) / (k + 1 - Fraction(1, d))


def product_ratio(sizes: Sequence[int], q: int, k: int) -> Fraction:
    """(min |A_i|)^{-1} |E|^{k+1} / q^{kd}."""
    size = prod(sizes)
    return Fraction(size ** (k + 1), min(sizes) * q ** (k * len(sizes)))


def _exponent_item(name: str, size: int, q: int, exponent: Fraction, applicable: bool = True,
                   note: Optional[str] = None) -> ThresholdItem:
    return ThresholdItem(
        name=name,
        exponent=exponent,
        satisfied=at_least_power(size, q, exponent),
        boundary=power_equals(size, q, exponent),
        applicable=applicable,
        note=note,
    )


def two_set_item(a_size: int, b_size: int, q: int, epsilon: Fraction) -> ThresholdItem:
    """|A| >= q^{1/2 + eps} and |B| >= q^{1 - 2 eps / 3} for A x B in F_q^2."""
    a_exp = Fraction(1, 2) + epsilon
    b_exp = 1 - Fraction(2, 3) * epsilon
    satisfied = at_least_power(a_size, q, a_exp) and at_least_power(b_size, q, b_exp)
    boundary = power_equals(a_size, q, a_exp) or power_equals(b_size, q, b_exp)
    return ThresholdItem(
        name="two_set_triangles",
        exponent=None,
        satisfied=satisfied,
        boundary=boundary,
        values={
            "epsilon": epsilon,
            "a_exponent": a_exp,
            "b_exponent": b_exp,
            "product_condition": a_size**2 * b_size**3 >= q**4,
        },
    )


def threshold_report(
    q: int,
    d: int,
    k: int,
    sizes: Optional[Sequence[int]] = None,
    size: Optional[int] = None,
    epsilon: Fraction = Fraction(0),
    census: Optional[Census] = None,
) -> ThresholdReport:
    """
    Which size hypotheses (q, d, k, |E| or |A_1|..|A_d|) satisfies. Pure
    arithmetic, so q need not be prime here.
    """
    if q < 2 or d < 1 or k < 1:
        raise UsageError("threshold report needs q >= 2, d >= 1, k >= 1")
    if sizes is not None:
        sizes = [int(s) for s in sizes]
        if len(sizes) != d:
            raise UsageError(f"{len(sizes)} coordinate sizes for d={d}")
        size = prod(sizes)
    if size is None:
        raise UsageError("give either sizes or size")

    items = [
        _exponent_item("general_simplices", size, q, general_exponent(d, k), applicable=k <= d),
        _exponent_item("triangles_plane", size, q, Fraction(8, 5), applicable=d == 2 and k == 2),
        _exponent_item(
            "distinct_distances_power_set", size, q, Fraction(d * d, 2 * d - 1), applicable=k == 1,
            note="A^d with |A|^d = |E|",
        ),
        _exponent_item(
            "distinct_distance_subset", size, q, Fraction(4, 3), applicable=d == 2,
            note="planar only",
        ),
    ]
    if sizes is not None:
        ratio = product_ratio(sizes, q, k)
        items.append(ThresholdItem(
            name="product_sets",
            exponent=None,
            satisfied=ratio >= 1,
            boundary=ratio == 1,
            applicable=k <= d,
            values={"ratio": ratio},
        ))
        if len(set(sizes)) == 1:
            items.append(_exponent_item("power_sets", size, q, power_set_exponent(d, k)))
        if d == 2 and k == 2:
            a_size, b_size = sorted(sizes)
            items.append(two_set_item(a_size, b_size, q, Fraction(epsilon)))

    report = ThresholdReport(
        q=q, d=d, k=k, size=size, sizes=sizes, items=items,
        target_classes=q ** comb(k + 1, 2),
        measured_classes=census.support_size if census is not None else None,
    )
    logger.debug("thresholds q=%d d=%d k=%d |E|=%d: %s", q, d, k, size,
                 [i.name for i in items if i.satisfied])
    return report
