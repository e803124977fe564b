"""
Multiplicities and Invariants

Classical and refined multiplicities of floors and of marked floor diagrams,
and their aggregation into the invariants N^δ and BG^δ. Also carries the
closed genus-1 formula and the calibration of the exponent convention
against it.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from config import TMOEBIUS_CONVENTION
from .core import HalfInt, LaurentPolynomial, Number, Partition, exact, format_number, q_analog, sigma1, sigma1_tilde
from .diagram import FloorDiagram, HomologyClass, SurfaceKind, VertexKind, aut_order
from .enumeration import (
    Marking, MarkingPattern, classify_components, enumerate_diagrams, enumerate_marking_patterns, check_request,
)
from .errors import InvalidRequestError
from .workers import parallel_map

logger = logging.getLogger("tmoebius.multiplicity")


class ExponentConvention(Enum):
    """Exponent of a floor's degree in its multiplicity: valence - 1, or valence"""
    VAL_MINUS_ONE = "val-1"
    VAL = "val"

    @classmethod
    def parse(cls, value: Any) -> ExponentConvention:
        if isinstance(value, ExponentConvention):
            return value
        text = str(value).strip().lower()
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown convention {value!r}, expected val-1 or val")

    @classmethod
    def default(cls) -> ExponentConvention:
        try:
            return cls.parse(TMOEBIUS_CONVENTION)
        except ValueError:
            return cls.VAL_MINUS_ONE

    def exponent(self, valence: int) -> int:
        return valence if self is ExponentConvention.VAL else valence - 1


def _check_weights(weights: Sequence[int]) -> None:
    if not weights:
        raise ValueError("a floor needs at least one adjacent elevator")


def etage_mult(a: int, weights: Sequence[int], convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE) -> int:
    """m(F) = a^{val-1} σ1(a) ∏ w"""
    _check_weights(weights)
    return a ** convention.exponent(len(weights)) * sigma1(a) * math.prod(weights)


def ground_mult(a: Any, weights: Sequence[int], convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE) -> int:
    """m(G) = 2 (2a)^{val-1} σ̃1(2a) ∏ w, with a the half-integer degree"""
    _check_weights(weights)
    doubled = HalfInt.parse(a).doubled
    return 2 * doubled ** convention.exponent(len(weights)) * sigma1_tilde(doubled) * math.prod(weights)


def _refined_sum(degree: int, divisors: Iterable[int], weights: Sequence[int]) -> LaurentPolynomial:
    total = LaurentPolynomial()
    for k in divisors:
        term = LaurentPolynomial.constant(k ** (len(weights) - 1))
        for w in weights:
            term = term * q_analog(w * degree // k)
        total = total + term
    return total


def etage_mult_q(a: int, weights: Sequence[int], convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE) -> LaurentPolynomial:
    """Σ_{k|a} k^{val-1} ∏ [w a/k]_q"""
    _check_weights(weights)
    refined = _refined_sum(a, (k for k in range(1, a + 1) if a % k == 0), weights)
    return refined * a if convention is ExponentConvention.VAL else refined


def ground_mult_q(a: Any, weights: Sequence[int], convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE) -> LaurentPolynomial:
    """2 Σ_{k odd, k|2a} k^{val-1} ∏ [w 2a/k]_q"""
    _check_weights(weights)
    doubled = HalfInt.parse(a).doubled
    refined = _refined_sum(doubled, (k for k in range(1, doubled + 1, 2) if doubled % k == 0), weights) * 2
    return refined * doubled if convention is ExponentConvention.VAL else refined


def _unmarked_weights(d: FloorDiagram, cells) -> List[int]:
    marked = {(kind, i) for kind, i in cells}
    return [e.weight for e in d.edges if ("edge", e.id) not in marked] + [
        e.weight for e in d.ends if ("end", e.id) not in marked
    ]


def multiplicity_numerator(d: FloorDiagram, cells, cycles: int, convention: ExponentConvention) -> int:
    """2^N ∏ m(F) ∏ m(G) ∏ w over unmarked elevators"""
    value = 2 ** cycles * math.prod(_unmarked_weights(d, cells))
    for v in d.floors:
        weights = d.adjacent_weights(v.id)
        if v.kind is VertexKind.ETAGE:
            value *= etage_mult(v.degree.doubled // 2, weights, convention)
        else:
            value *= ground_mult(v.degree, weights, convention)
    if not isinstance(value, int) or value <= 0:
        raise ArithmeticError(f"multiplicity numerator {value} is not a positive integer")
    return value


def refined_numerator(d: FloorDiagram, cells, cycles: int, convention: ExponentConvention) -> LaurentPolynomial:
    value = LaurentPolynomial.constant(2 ** cycles * math.prod(_unmarked_weights(d, cells)))
    for v in d.floors:
        weights = d.adjacent_weights(v.id)
        if v.kind is VertexKind.ETAGE:
            value = value * etage_mult_q(v.degree.doubled // 2, weights, convention)
        else:
            value = value * ground_mult_q(v.degree, weights, convention)
    return value


@dataclass(frozen=True)
class MarkedDiagram:
    diagram: FloorDiagram
    marking: Marking
    surface: SurfaceKind
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE

    @property
    def cycles(self) -> int:
        return classify_components(self.diagram, self.marking.cells).odd_cycles


def marked_mult(md: MarkedDiagram) -> Number:
    """2^N / |Aut D| ∏ m(F) ∏ m(G) ∏_{unmarked} w"""
    numerator = multiplicity_numerator(md.diagram, md.marking.cells, md.cycles, md.convention)
    return exact(Fraction(numerator, aut_order(md.diagram)))


def marked_mult_q(md: MarkedDiagram) -> LaurentPolynomial:
    numerator = refined_numerator(md.diagram, md.marking.cells, md.cycles, md.convention)
    return numerator / aut_order(md.diagram)


@dataclass(frozen=True)
class InvariantRequest:
    """N^δ_{g, aE+bF}(μ, ν): μ fixed end weights, ν free end weights"""
    surface: SurfaceKind
    genus: int
    homology: HomologyClass
    fixed: Partition = field(default_factory=Partition)
    free: Partition = field(default_factory=Partition)
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE

    @property
    def profile(self) -> Partition:
        return self.fixed + self.free

    def problems(self) -> List[str]:
        """Violated relations other than parity"""
        problems = [p for p in check_request(self.surface, self.genus, self.homology, self.profile) if "mod 2" not in p]
        return [p.replace("‖profile‖", "‖μ‖+‖ν‖") for p in problems]

    def parity_ok(self) -> bool:
        return self.homology.parity_ok(self.surface)

    def validate(self, allow_parity: bool = True) -> None:
        """Raise InvalidRequestError naming every violated relation"""
        problems = self.problems()
        if not allow_parity and not self.parity_ok():
            problems.append(f"2b ≡ 2δa mod 2 fails for δ={self.surface.delta}, class {self.homology}")
        if problems:
            raise InvalidRequestError("; ".join(problems))


@dataclass(frozen=True)
class InvariantResult:
    N: Number
    BG: LaurentPolynomial
    diagram_count: int
    marking_count: int
    convention: ExponentConvention

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": format_number(self.N),
            "BG": self.BG.to_json(),
            "diagram_count": self.diagram_count,
            "marking_count": self.marking_count,
            "convention": self.convention.value,
        }


def diagram_contribution(
    d: FloorDiagram,
    fixed: Partition,
    free: Partition,
    convention: ExponentConvention,
    patterns: Optional[List[MarkingPattern]] = None,
) -> Tuple[Fraction, LaurentPolynomial, int]:
    """(Σ classical, Σ refined, number of markings) over the markings of one diagram"""
    if patterns is None:
        patterns = enumerate_marking_patterns(d, fixed, free)
    aut = aut_order(d)
    classical = Fraction(0)
    refined = LaurentPolynomial()
    markings = 0
    for pattern in patterns:
        classical += Fraction(pattern.extensions * multiplicity_numerator(d, pattern.cells, pattern.cycles, convention), aut)
        refined = refined + refined_numerator(d, pattern.cells, pattern.cycles, convention) * pattern.extensions
        markings += pattern.extensions
    return classical, refined / aut, markings


def compute_invariant(req: InvariantRequest, jobs: Optional[int] = None) -> InvariantResult:
    """
    Sum marked multiplicities over every diagram and marking of the request.

    A class breaking 2b ≡ 2δa mod 2 has no curves and gives zero; any other
    inconsistency raises InvalidRequestError.
    """
    req.validate()
    if not req.parity_ok():
        logger.warning(f"Class {req.homology} breaks the parity rule on {req.surface}; invariant is 0")
        return InvariantResult(0, LaurentPolynomial(), 0, 0, req.convention)

    # Ends are unlabeled here and markings place the free ends in every order,
    # so no ν! factor appears: repeated free weights are absorbed by 1/|Aut|
    # together with the distinct marking placements.
    diagrams = enumerate_diagrams(req.surface, req.genus, req.homology, req.profile, jobs)
    task = functools.partial(diagram_contribution, fixed=req.fixed, free=req.free, convention=req.convention)
    contributions = parallel_map(task, diagrams, jobs)

    total = Fraction(0)
    refined = LaurentPolynomial()
    markings = 0
    for classical, refined_part, count in contributions:
        total += classical
        refined = refined + refined_part
        markings += count
    logger.info(f"N = {format_number(total)} from {len(diagrams)} diagrams and {markings} markings")
    return InvariantResult(exact(total), refined, len(diagrams), markings, req.convention)


def invariant_N(req: InvariantRequest, jobs: Optional[int] = None) -> Number:
    return compute_invariant(req, jobs).N


def invariant_BG(req: InvariantRequest, jobs: Optional[int] = None) -> LaurentPolynomial:
    return compute_invariant(req, jobs).BG


def genus1_formula(surface: SurfaceKind, a: Any, b: Any) -> int:
    """(2a)^{2b} (σ̃1(2a) + [a, b ∈ ℤ] σ1(a))"""
    a, b = HalfInt.parse(a), HalfInt.parse(b)
    if a.doubled < 1 or b.doubled < 1:
        raise InvalidRequestError(f"genus-1 formula needs a, b ≥ 1/2, got a={a}, b={b}")
    if not HomologyClass(a, b).parity_ok(surface):
        raise InvalidRequestError(f"2b ≡ 2δa mod 2 fails for δ={surface.delta}, a={a}, b={b}")
    bracket = sigma1(a.doubled // 2) if a.is_integer() and b.is_integer() else 0
    return a.doubled ** b.doubled * (sigma1_tilde(a.doubled) + bracket)


@dataclass(frozen=True)
class CalibrationPoint:
    surface: SurfaceKind
    a: HalfInt
    b: HalfInt
    formula: int
    values: Dict[ExponentConvention, Number]

    def ratio(self, convention: ExponentConvention) -> Optional[Fraction]:
        """formula / N, None when N vanishes"""
        value = self.values[convention]
        return Fraction(self.formula) / Fraction(value) if value else None


@dataclass(frozen=True)
class CalibrationReport:
    points: Tuple[CalibrationPoint, ...]

    def matches(self, convention: ExponentConvention) -> bool:
        return all(p.values[convention] == p.formula for p in self.points)

    def matching_conventions(self) -> List[ExponentConvention]:
        return [c for c in ExponentConvention if self.matches(c)]

    def to_json(self) -> Dict[str, Any]:
        return {
            "matching": [c.value for c in self.matching_conventions()],
            "points": [
                {
                    "surface": str(p.surface),
                    "a": str(p.a),
                    "b": str(p.b),
                    "formula": p.formula,
                    **{f"N[{c.value}]": format_number(p.values[c]) for c in ExponentConvention},
                    **{f"ratio[{c.value}]": format_number(p.ratio(c)) if p.ratio(c) is not None else None
                       for c in ExponentConvention},
                }
                for p in self.points
            ],
        }


def calibrate_genus1(
    surfaces: Sequence[SurfaceKind] = (SurfaceKind.M0, SurfaceKind.M1),
    max_doubled_a: int = 6,
    max_doubled_b: int = 4,
    jobs: Optional[int] = None,
) -> CalibrationReport:
    """Genus-1 invariants with profile 1^{2b} against the closed formula, under both conventions"""
    points = []
    for surface in surfaces:
        for doubled_a in range(1, max_doubled_a + 1):
            for doubled_b in range(1, max_doubled_b + 1):
                cls = HomologyClass(HalfInt(doubled_a), HalfInt(doubled_b))
                if not cls.parity_ok(surface):
                    continue
                values = {
                    convention: invariant_N(
                        InvariantRequest(surface, 1, cls, Partition(), Partition((1,) * doubled_b), convention), jobs
                    )
                    for convention in ExponentConvention
                }
                points.append(CalibrationPoint(surface, cls.a, cls.b, genus1_formula(surface, cls.a, cls.b), values))
    report = CalibrationReport(tuple(points))
    logger.info(f"Genus-1 calibration over {len(points)} classes; matching conventions: "
                f"{[c.value for c in report.matching_conventions()] or 'none'}")
    return report
