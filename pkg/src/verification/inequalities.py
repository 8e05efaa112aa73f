"""
Executable verifiers for the counting inequalities on distance statistics.

Every pass/fail decision here is exact: integers, Fractions, and squared
comparisons for square roots. Floats appear only as reported diagnostics.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.config.settings import settings
from src.core.errors import UsageError
from src.core.ff import canonical_tuple
from src.core.motions import motion_statistics, orthogonal_order
from src.core.pointset import (
    PointSet,
    bisector_line,
    distance_distribution,
    hinge_counts,
    isotropic_report,
    quadruple_count,
)
from src.graphs.specgraph import (
    MixingResult,
    NDLGraph,
    VertexMultiset,
    build_er_graph,
    build_reflection_graph,
    circle_branch,
    mixing_edges,
)
from src.utils.exact import floor_plus_sqrt, le_plus_sqrt
from src.utils.reports import LemmaReport, check
from src.verification.census import cauchy_schwarz_lower_bound, congruence_orbits, simplex_census

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Power sums
# ---------------------------------------------------------------------------

@dataclass
class PowerSumResult:
    lhs: int
    rhs: Fraction
    passed: bool


def power_sum_bound(
    l1: int, linf: int, square_sum: int, domain_size: int, n: int, coefficient: Optional[Fraction] = None
) -> Fraction:
    """|V| (|f|_1/|V|)^n + c |f|_inf^{n-2} sum (f - |f|_1/|V|)^2 with c = n(n-1)/2 by default."""
    if coefficient is None:
        coefficient = Fraction(n * (n - 1), 2)
    mean = Fraction(l1, domain_size)
    variance = square_sum - mean * l1
    return domain_size * mean**n + coefficient * linf ** (n - 2) * variance


def power_sum_check(f_values: Sequence[int], domain_size: int, n: int) -> PowerSumResult:
    """sum f^n against the power-sum bound for a nonnegative f on a finite space V."""
    if n < 2:
        raise UsageError(f"power-sum bound needs n >= 2, got {n}")
    values = [int(v) for v in f_values]
    if len(values) != domain_size:
        raise UsageError(f"{len(values)} values for a domain of size {domain_size}")
    if any(v < 0 for v in values):
        raise UsageError("power-sum bound needs a nonnegative function")
    lhs = sum(v**n for v in values)
    rhs = power_sum_bound(sum(values), max(values, default=0), sum(v * v for v in values), domain_size, n)
    return PowerSumResult(lhs, rhs, lhs <= rhs)


# ---------------------------------------------------------------------------
# Product sets: the ER(F_q^{2d}) embedding
# ---------------------------------------------------------------------------

@dataclass
class EmbeddingResult:
    a: int
    b: int
    n_direct: int
    n_graph: int
    u_size: int
    v_size: int
    max_mult_u: int
    max_mult_v: int
    mixing: MixingResult
    concluding_bound: Fraction
    printed_intermediate_bound: Fraction
    printed_u_size: Fraction

    @property
    def passed(self) -> bool:
        return (
            self.n_direct == self.n_graph
            and self.max_mult_u <= 2
            and self.max_mult_v <= 2
            and self.mixing.holds
            and self.n_direct <= self.concluding_bound
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a,
            "b": self.b,
            "n_direct": self.n_direct,
            "n_graph": self.n_graph,
            "u_size": self.u_size,
            "v_size": self.v_size,
            "max_mult_u": self.max_mult_u,
            "max_mult_v": self.max_mult_v,
            "mixing": self.mixing.to_dict(),
            "concluding_bound": self.concluding_bound,
            "printed_intermediate_bound": self.printed_intermediate_bound,
            "printed_u_size": self.printed_u_size,
            "pass": self.passed,
        }


def embedding_vectors(pointset: PointSet, a: int, b: int):
    """
    Index sets of U = {(x', t)} and V = {(z, y')} with x' and y' ranging over
    A_1 x ... x A_{d-1}, t and z over E, and vectors chosen so that
    u . v = ||(x', a) - z|| - ||(y', b) - t||.
    """
    q = pointset.q
    prefixes = list(itertools.product(*pointset.sets[:-1]))

    def u_vec(xp, t):
        tail = -((t[-1] - b) ** 2) - sum(c * c for c in t[:-1]) + sum(c * c for c in xp)
        return tuple(c % q for c in [-2 * c for c in xp] + [1] + list(t[:-1]) + [tail])

    def v_vec(z, yp):
        middle = (z[-1] - a) ** 2 + sum(c * c for c in z[:-1]) - sum(c * c for c in yp)
        return tuple(c % q for c in list(z[:-1]) + [middle] + [2 * c for c in yp] + [1])

    us = [((xp, t), u_vec(xp, t)) for xp in prefixes for t in pointset.points]
    vs = [((z, yp), v_vec(z, yp)) for z in pointset.points for yp in prefixes]
    return us, vs


def _direct_embedding_count(pointset: PointSet, a: int, b: int) -> int:
    """#{(x, y, z, t) : x_d = a, y_d = b, ||x - z|| = ||y - t||} from two distance histograms."""
    q = pointset.q
    prefixes = np.array(list(itertools.product(*pointset.sets[:-1])), dtype=np.int64).reshape(-1, pointset.d - 1)
    arr = pointset.array

    def histogram(last: int) -> np.ndarray:
        rows = np.hstack([prefixes, np.full((len(prefixes), 1), last, dtype=np.int64)])
        diff = rows[:, None, :] - arr[None, :, :]
        return np.bincount(((diff * diff).sum(axis=-1) % q).ravel(), minlength=q)

    return int(histogram(a) @ histogram(b))


def mainlm_embedding(pointset: PointSet, a: int, b: int, graph: Optional[NDLGraph] = None) -> EmbeddingResult:
    """
    N(a, b) counted directly and as e(U, V) in ER(F_q^{2d}), with U and V the
    projective images of the index sets above, multiplicities tracked.
    """
    if not pointset.is_product or pointset.d < 2:
        raise UsageError("the ER(F_q^{2d}) embedding needs a product set with d >= 2")
    last = pointset.sets[-1]
    if a not in last or b not in last:
        raise UsageError(f"a={a} and b={b} must lie in A_d = {list(last)}")
    q, d = pointset.q, pointset.d
    graph = graph or build_er_graph(q, 2 * d)

    us, vs = embedding_vectors(pointset, a, b)
    u_items = [graph.index[canonical_tuple(vec, q)] for _, vec in us]
    v_items = [graph.index[canonical_tuple(vec, q)] for _, vec in vs]
    u_set, v_set = VertexMultiset.from_items(u_items), VertexMultiset.from_items(v_items)
    mixing = mixing_edges(graph, u_set, v_set)

    size, ad = len(pointset), len(last)
    error = Fraction(2 * q ** (d - 1) * size**2, ad)
    return EmbeddingResult(
        a=a,
        b=b,
        n_direct=_direct_embedding_count(pointset, a, b),
        n_graph=mixing.edges,
        u_size=u_set.size,
        v_size=v_set.size,
        max_mult_u=max(u_set.counts.values()),
        max_mult_v=max(v_set.counts.values()),
        mixing=mixing,
        concluding_bound=Fraction(size**4, ad * ad * q) + error,
        printed_intermediate_bound=Fraction(size**2, ad * ad * q) + error,
        printed_u_size=Fraction(size, ad),
    )


@dataclass
class NuSquareResult:
    lhs: int
    rhs: Fraction
    passed: bool
    order: List[int]
    min_size: int

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed, "order": self.order, "min_size": self.min_size}


def smallest_last(pointset: PointSet) -> List[int]:
    sizes = [len(a) for a in pointset.sets]
    smallest = sizes.index(min(sizes))
    return [i for i in range(pointset.d) if i != smallest] + [smallest]


def nu_square_bound_product(pointset: PointSet) -> NuSquareResult:
    """W < |E|^4 / q + 2 q^{d-1} |E|^2 min |A_i|, with the smallest coordinate set moved last."""
    if not pointset.is_product:
        raise UsageError("nu_square_bound_product needs a product set")
    order = smallest_last(pointset)
    rotated = pointset.permuted(order)
    dist = distance_distribution(rotated)
    assert dist.counts == distance_distribution(pointset).counts, "nu changed under a coordinate permutation"

    q, d, size = pointset.q, pointset.d, len(pointset)
    lhs = quadruple_count(dist)
    min_size = len(rotated.sets[-1])
    rhs_num = size**4 + 2 * q**d * size**2 * min_size
    return NuSquareResult(lhs, Fraction(rhs_num, q), lhs * q < rhs_num, order, min_size)


# ---------------------------------------------------------------------------
# Planar bounds
# ---------------------------------------------------------------------------

@dataclass
class IncidenceResult:
    incidences: int
    lines: int
    distinct_lines: int
    line_energy: int
    line_energy_bound: Fraction
    mixing: MixingResult
    printed_bound_holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "incidences": self.incidences,
            "lines": self.lines,
            "distinct_lines": self.distinct_lines,
            "line_energy": self.line_energy,
            "line_energy_bound": self.line_energy_bound,
            "mixing": self.mixing.to_dict(),
            "printed_bound_holds": self.printed_bound_holds,
        }


def bisector_incidences(pointset: PointSet, graph: Optional[NDLGraph] = None) -> IncidenceResult:
    """
    Points (a, b) -> [a, b, 1] and bisector lines cx + dy + e = 0 -> [c, d, e]
    in ER(F_q^3); incidences are the edges between the two multisets.
    """
    if pointset.d != 2:
        raise UsageError("bisector incidences are planar")
    q = pointset.q
    graph = graph or build_er_graph(q, 3)
    pts = pointset.points
    weights: Dict[tuple, int] = {}
    for p1 in pts:
        for p2 in pts:
            if p1 != p2:
                line = bisector_line(p1, p2, q).coefficients
                weights[line] = weights.get(line, 0) + 1

    points = VertexMultiset.from_items([graph.index[canonical_tuple((x, y, 1), q)] for x, y in pts])
    lines = VertexMultiset({graph.index[line]: w for line, w in weights.items()})
    mixing = mixing_edges(graph, points, lines)

    size, n_lines = len(pointset), lines.size
    energy = lines.square_sum()
    nonzero = quadruple_count(distance_distribution(pointset), nonzero_only=True)
    s = q + circle_branch(q)
    energy_bound = Fraction(nonzero, q) + 2 * s * size**2
    printed = le_plus_sqrt(mixing.edges, Fraction(size * n_lines, q), 1, q * size * energy)
    return IncidenceResult(mixing.edges, n_lines, len(weights), energy, energy_bound, mixing, printed)


@dataclass
class PlanarResult:
    lhs: int
    constant: int
    size: int
    q: int
    passed: bool
    within_hypothesis: bool
    isotropic_pairs: int
    quadratic_path_holds: bool
    quadratic_root: float
    best_constant: float
    incidences: Optional[IncidenceResult] = None

    @property
    def main_term(self) -> Fraction:
        return Fraction(self.size**4, self.q)

    @property
    def rhs(self) -> int:
        """floor(C (|E|^4 / q + q |E|^{5/2})); an integer lhs passes iff lhs <= rhs."""
        return floor_plus_sqrt(self.constant * self.main_term, self.constant * self.q * self.size**2, self.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "constant": self.constant,
            "main_term": self.main_term,
            "rhs": self.rhs,
            "pass": self.passed,
            "within_hypothesis": self.within_hypothesis,
            "isotropic_pairs": self.isotropic_pairs,
            "quadratic_path_holds": self.quadratic_path_holds,
            "quadratic_root": self.quadratic_root,
            "best_constant": self.best_constant,
            "incidences": self.incidences.to_dict() if self.incidences else None,
        }


def nu_square_bound_planar(
    pointset: PointSet, constant: Optional[int] = None, with_incidences: bool = True
) -> PlanarResult:
    """
    X = sum_{lam != 0} nu(lam)^2 against C (|E|^4 / q + q |E|^{5/2}). Sets with
    |E| < 4q are evaluated and labelled outside the hypothesis.
    """
    if pointset.d != 2:
        raise UsageError("the planar bound needs d = 2")
    constant = settings.PLANAR_CONSTANT if constant is None else constant
    q, size = pointset.q, len(pointset)
    x = quadruple_count(distance_distribution(pointset), nonzero_only=True)
    main = Fraction(size**4, q)
    passed = le_plus_sqrt(x, constant * main, constant * q * size**2, size)

    # X <= A, or (X - A)^2 <= |E|^3 (X + q D) with D = 2(q - 1)|E|^2
    d_term = 2 * (q - 1) * size**2
    cube = size**3
    quadratic = x <= main or (x - main) ** 2 <= cube * (x + q * d_term)
    b_coef = 2 * main + cube
    disc = b_coef * b_coef - 4 * (main * main - cube * q * d_term)
    root = (float(b_coef) + math.sqrt(float(disc))) / 2

    scale = float(main) + q * size**2.5
    return PlanarResult(
        lhs=x,
        constant=constant,
        size=size,
        q=q,
        passed=passed,
        within_hypothesis=size >= 4 * q,
        isotropic_pairs=isotropic_report(pointset).count,
        quadratic_path_holds=quadratic,
        quadratic_root=root,
        best_constant=x / scale if scale else 0.0,
        incidences=bisector_incidences(pointset) if with_incidences else None,
    )


@dataclass
class HingeBoundResult:
    hinge_total: int
    passed: bool
    corollary_applies: bool
    corollary_holds: bool
    best_constant: Fraction
    constant: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hinge_total": self.hinge_total,
            "pass": self.passed,
            "corollary_applies": self.corollary_applies,
            "corollary_holds": self.corollary_holds,
            "best_constant": self.best_constant,
            "constant": self.constant,
        }


def hinge_upper_bound(pointset: PointSet, constant: Optional[int] = None) -> HingeBoundResult:
    """
    sum_{lam != 0} H_lam <= |E|^3 / q + q^{1/2} |E|^{1/2} sqrt(X / q + 2(q - 1)|E|^2),
    and sum H <= C |E|^3 / q once |E| >= q^{4/3}.
    """
    if pointset.d != 2:
        raise UsageError("the hinge bound needs d = 2")
    constant = settings.PLANAR_CONSTANT if constant is None else constant
    q, size = pointset.q, len(pointset)
    total = hinge_counts(pointset).total()
    x = quadruple_count(distance_distribution(pointset), nonzero_only=True)
    inner = Fraction(x, q) + 2 * (q - 1) * size**2
    passed = le_plus_sqrt(total, Fraction(size**3, q), 1, q * size * inner)
    applies = size**3 >= q**4
    best = Fraction(total * q, size**3)
    return HingeBoundResult(total, passed, applies, (not applies) or best <= constant, best, constant)


@dataclass
class ReflectionEnergyResult:
    lam: int
    pairs: int
    energy: int
    bound: Fraction
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lam": self.lam, "pairs": self.pairs, "energy": self.energy, "bound": self.bound, "pass": self.passed}


def reflection_pair_energy(pointset: PointSet, lam: int, graph: Optional[NDLGraph] = None) -> ReflectionEnergyResult:
    """Q_lam = e(B, B) in RF_lam for B the ordered pairs of E at distance lam."""
    if pointset.d != 2:
        raise UsageError("reflection energy is planar")
    q = pointset.q
    lam %= q
    graph = graph or build_reflection_graph(q, lam)
    pts = pointset.points
    items = [
        graph.index[x + y] for x in pts for y in pts
        if ((x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2) % q == lam
    ]
    pairs = VertexMultiset.from_items(items)
    energy = mixing_edges(graph, pairs, pairs).edges
    s = q + circle_branch(q)
    bound = Fraction(len(items) ** 2, q) + 2 * s * len(items)
    return ReflectionEnergyResult(lam, len(items), energy, bound, energy <= bound)


# ---------------------------------------------------------------------------
# The census inequality chain
# ---------------------------------------------------------------------------

def theorem_chain_report(pointset: PointSet, k: int, threads: Optional[int] = None) -> LemmaReport:
    """
    Every link from the motion sweep down to |T_{k,d}(E)|, with enumerated
    group orders; printed variants are kept as non-gating records.
    """
    if k < 1 or k > pointset.d:
        raise UsageError(f"the chain needs 1 <= k <= d, got k={k}")
    q, d, size = pointset.q, pointset.d, len(pointset)
    report = LemmaReport("eq-2-chain", {"pointset": pointset.describe(), "k": k})

    census = simplex_census(pointset, k, threads=threads)
    report.add(check("census_mass", census.total, size ** (k + 1), "=="))

    w = quadruple_count(distance_distribution(pointset))
    o_d, o_d1 = orthogonal_order(q, d), orthogonal_order(q, d - 1)
    stats = motion_statistics(pointset, k, threads=threads)
    report.add(check("profile_mass", stats.mass_identity_holds, True, "=="))

    pair_sweep = o_d1 * w + o_d * size**2
    report.add(check("pair_sweep_identity", stats.s1, pair_sweep))
    report.add(check(
        "pair_sweep_halved", stats.s1, Fraction(o_d1 * w, 2) + o_d * size**2, gating=False,
        note="printed with |O(d-1)| W / 2",
    ))

    l1 = o_d * size**2
    domain = o_d * q**d
    lemma = power_sum_bound(l1, stats.max_w, stats.s1, domain, k + 1)
    report.add(check("power_sum_on_motions", stats.s2, lemma))
    printed_coef = Fraction(k * (k - 1), 2)
    report.add(check(
        "power_sum_printed_coefficient", stats.s2,
        power_sum_bound(l1, stats.max_w, stats.s1, domain, k + 1, printed_coef), gating=False,
        note="printed coefficient k(k-1)/2",
    ))
    report.add(check("pointwise_power", stats.s2, stats.max_w ** (k - 1) * stats.s1))

    # substitute the pair sweep identity and |f|_inf <= |E|
    chained = Fraction(o_d * size ** (2 * k + 2), q ** (k * d)) + Fraction((k + 1) * k, 2) * size ** (k - 1) * (
        pair_sweep - Fraction(o_d * size**4, q**d)
    )
    report.add(check("square_sweep_chain", stats.s2, chained))

    orbits = congruence_orbits(pointset, k, threads=threads)
    orbit_sum = orbits.orbit_sum()
    report.add(check("orbit_sum_bound", orbit_sum, stats.s2, "<="))
    report.add(check("orbit_sum_identity", orbit_sum, stats.s2, "=="))
    split = orbits.split_classes()
    report.add(check(
        "distance_matrix_sum", orbits.distance_matrix_sum(), stats.s2, gating=not split,
        note=f"{len(split)} distance matrices split into several orbits" if split else None,
    ))
    violations = orbits.stabilizer_violations()
    report.add(check("stabilizer_bound", len(violations), 0, "=="))

    bound, exact_t = cauchy_schwarz_lower_bound(census)
    report.add(check("cauchy_schwarz", exact_t, bound, ">="))
    report.add(check(
        "final_T", exact_t, Fraction(size ** (2 * k + 2), stats.s2), ">=", gating=not split,
    ))

    report.details.update({
        "W": w,
        "group_orders": {"O(d)": o_d, "O(d-1)": o_d1},
        "S1": stats.s1,
        "S2": stats.s2,
        "max_w": stats.max_w,
        "T": exact_t,
        "orbits": len(orbits.orbits),
        "split_classes": [dm.key for dm in split],
        "unchecked_stabilizers": len(orbits.orbits) - len(orbits.checkable_orbits()),
    })
    logger.info("chain q=%d d=%d k=%d |E|=%d: %s", q, d, k, size, "pass" if report.passed else "FAIL")
    return report
