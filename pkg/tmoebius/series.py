"""
Generating Series

Generating series of the invariants in the fiber degree, their per-shape
expansion, the product factorization of each shape's series into derivatives
of G2(y^2), H, H0 and H1, and exact span checks over the rationals.
"""
from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from config import TMOEBIUS_SERIES_ORDER
from .core import (
    HalfInt, Partition, TruncatedSeries, eisenstein_G2, format_number, series_H, series_H0, series_H1, series_sum,
    sigma1_tilde,
)
from .diagram import FloorDiagram, HomologyClass, SurfaceKind, VertexKind, aut_order
from .enumeration import enumerate_marking_patterns, enumerate_weighted_shapes
from .errors import InvalidRequestError
from .multiplicity import ExponentConvention, InvariantRequest, invariant_N, multiplicity_numerator
from .workers import parallel_map

logger = logging.getLogger("tmoebius.series")


@dataclass(frozen=True)
class SeriesRequest:
    """F^δ_{g,b}(μ, ν)(y) = Σ_a N^δ_{g,aE+bF}(μ, ν) y^{2a}, kept up to y^order"""
    surface: SurfaceKind
    genus: int
    b: HalfInt
    fixed: Partition = field(default_factory=Partition)
    free: Partition = field(default_factory=Partition)
    order: int = TMOEBIUS_SERIES_ORDER
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE

    @property
    def profile(self) -> Partition:
        return self.fixed + self.free

    def problems(self) -> List[str]:
        problems = []
        if self.genus < 1:
            problems.append(f"genus must be at least 1, got {self.genus}")
        if self.b.doubled < 1:
            problems.append(f"b must be at least 1/2, got {self.b}")
        if self.profile.norm() != self.b.doubled:
            problems.append(f"‖μ‖+‖ν‖ = {self.profile.norm()} differs from 2b = {self.b.doubled}")
        if self.order < 0:
            problems.append(f"order must be nonnegative, got {self.order}")
        if self.surface is SurfaceKind.M0 and not self.b.is_integer():
            problems.append("2b ≡ 2δa mod 2 has no solution a on m0 when b is not an integer")
        return problems

    def validate(self) -> None:
        problems = self.problems()
        if problems:
            raise InvalidRequestError("; ".join(problems))

    def admissible(self, doubled_a: int) -> bool:
        return doubled_a >= 1 and (self.b.doubled - self.surface.delta * doubled_a) % 2 == 0

    def admissible_degrees(self) -> List[int]:
        """Values 2a ≤ order on the surface's grid"""
        return [n for n in range(1, self.order + 1) if self.admissible(n)]

    def invariant_request(self, doubled_a: int) -> InvariantRequest:
        return InvariantRequest(
            self.surface, self.genus, HomologyClass(HalfInt(doubled_a), self.b), self.fixed, self.free, self.convention
        )


def generating_series(req: SeriesRequest, jobs: Optional[int] = None) -> TruncatedSeries:
    """One invariant per admissible y^{2a}; zero elsewhere"""
    req.validate()
    values = {n: invariant_N(req.invariant_request(n), jobs) for n in req.admissible_degrees()}
    logger.info(f"Generating series on {req.surface}, genus {req.genus}, b={req.b}: {len(values)} coefficients")
    return TruncatedSeries.from_function(req.order, lambda n: values.get(n, 0))


def _ground_parity(shape: FloorDiagram, surface: SurfaceKind, ground_id: int) -> Optional[int]:
    """Required parity of 2a_G, None when every value is allowed, -1 when none is"""
    outflow = shape.outflow(ground_id)
    if surface is SurfaceKind.M0:
        return None if outflow % 2 == 0 else -1
    return outflow % 2


def per_diagram_series(
    shape: FloorDiagram,
    surface: SurfaceKind,
    fixed: Partition,
    free: Partition,
    order: int,
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE,
) -> TruncatedSeries:
    """
    Series of one degree-free weighted shape.

    Sums the marked multiplicities over every labeled assignment of floor
    degrees; isomorphic assignments are balanced by 1/|Aut shape|.
    """
    floors = shape.floors
    parities = {g.id: _ground_parity(shape, surface, g.id) for g in shape.ground_floors}
    if any(p == -1 for p in parities.values()):
        return TruncatedSeries.zero(order)
    patterns = enumerate_marking_patterns(shape, fixed, free)
    if not patterns:
        return TruncatedSeries.zero(order)
    aut = aut_order(shape)

    def options(vertex) -> List[int]:
        if vertex.kind is VertexKind.ETAGE:
            return list(range(2, order + 1, 2))
        parity = parities[vertex.id]
        return [n for n in range(1, order + 1) if parity is None or n % 2 == parity]

    coefficients = [Fraction(0)] * (order + 1)
    for doubled in itertools.product(*(options(v) for v in floors)):
        total = sum(doubled)
        if total > order:
            continue
        d = shape.with_degrees({v.id: HalfInt(n) for v, n in zip(floors, doubled)})
        coefficients[total] += sum(
            (Fraction(p.extensions * multiplicity_numerator(d, p.cells, p.cycles, convention), aut) for p in patterns),
            Fraction(0),
        )
    return TruncatedSeries(tuple(coefficients))


@dataclass(frozen=True, order=True)
class SeriesFactor:
    """(D^k G2)(y^2) for an étage, (D^k H)(y) or (D^k H_ε)(y) for a ground floor"""
    generator: str
    derivatives: int

    def expand(self, order: int) -> TruncatedSeries:
        if self.generator == "G2(y^2)":
            return eisenstein_G2(order // 2).derive(self.derivatives).substitute_power(2).truncate(order)
        base = {"H": series_H, "H0": series_H0, "H1": series_H1}[self.generator]
        return base(order).derive(self.derivatives)

    def leading(self) -> Tuple[int, Fraction]:
        """(lowest exponent, its coefficient)"""
        if self.generator == "G2(y^2)":
            return 2, Fraction(1)
        n = 2 if self.generator == "H0" else 1
        return n, Fraction(n ** self.derivatives * sigma1_tilde(n))

    def __str__(self) -> str:
        prefix = f"D^{self.derivatives} " if self.derivatives else ""
        return f"({prefix}{self.generator})"


@dataclass(frozen=True)
class FactorizedSeries:
    weight: Fraction
    factors: Tuple[SeriesFactor, ...]

    def expand(self, order: int) -> TruncatedSeries:
        result = TruncatedSeries.from_function(order, lambda n: self.weight if n == 0 else 0)
        for factor in self.factors:
            result = result * factor.expand(order)
        return result

    def is_zero(self) -> bool:
        return self.weight == 0

    def to_json(self) -> Dict[str, Any]:
        return {"W": format_number(self.weight), "factors": [str(f) for f in self.factors]}

    def __str__(self) -> str:
        return " ".join([format_number(self.weight)] + [str(f) for f in self.factors])


def factorized_form(
    shape: FloorDiagram,
    surface: SurfaceKind,
    fixed: Partition,
    free: Partition,
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE,
) -> FactorizedSeries:
    """
    W · ∏_étages (D^k G2)(y^2) · ∏_grounds (D^k H_ε)(y).

    W is the shape's multiplicity at the smallest admissible degrees divided
    by the leading coefficients of the floor factors.
    """
    factors = []
    base_degrees = {}
    for v in shape.floors:
        k = convention.exponent(shape.valence(v.id))
        if v.kind is VertexKind.ETAGE:
            factor = SeriesFactor("G2(y^2)", k)
        else:
            parity = _ground_parity(shape, surface, v.id)
            if parity == -1:
                return FactorizedSeries(Fraction(0), ())
            factor = SeriesFactor("H" if parity is None else f"H{parity}", k)
        factors.append(factor)
        base_degrees[v.id] = factor.leading()[0]

    patterns = enumerate_marking_patterns(shape, fixed, free)
    if not patterns:
        return FactorizedSeries(Fraction(0), ())
    d = shape.with_degrees({vid: HalfInt(n) for vid, n in base_degrees.items()})
    base_value = sum(
        (Fraction(p.extensions * multiplicity_numerator(d, p.cells, p.cycles, convention)) for p in patterns),
        Fraction(0),
    ) / aut_order(shape)
    leading = Fraction(1)
    for factor in factors:
        leading *= factor.leading()[1]
    return FactorizedSeries(base_value / leading, tuple(sorted(factors)))


def _shape_series(shape: FloorDiagram, surface: SurfaceKind, fixed: Partition, free: Partition,
                  order: int, convention: ExponentConvention) -> TruncatedSeries:
    return per_diagram_series(shape, surface, fixed, free, order, convention)


def series_from_shapes(req: SeriesRequest, jobs: Optional[int] = None) -> TruncatedSeries:
    """Sum of the per-shape series over every degree-free weighted shape"""
    req.validate()
    shapes = enumerate_weighted_shapes(req.surface, req.genus, req.profile)
    task = functools.partial(
        _shape_series, surface=req.surface, fixed=req.fixed, free=req.free, order=req.order, convention=req.convention
    )
    return series_sum(parallel_map(task, shapes, jobs), req.order)


@dataclass(frozen=True)
class SpanCertificate:
    ok: bool
    monomials: Tuple[Tuple[int, ...], ...]
    combination: Optional[Tuple[Fraction, ...]]
    witness: Optional[int]
    order: int

    def to_json(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "order": self.order,
            "monomials": [list(m) for m in self.monomials],
            "combination": [format_number(c) for c in self.combination] if self.combination is not None else None,
            "witness": self.witness,
        }


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _consistent(matrix: sympy.Matrix, target: sympy.Matrix, rows: int) -> bool:
    head = matrix[:rows, :]
    return head.rank() == head.row_join(target[:rows, :]).rank()


def quasimodular_span_check(
    target: TruncatedSeries,
    generators: Sequence[TruncatedSeries],
    order: int,
    max_degree: int = 1,
    monomials: Optional[Sequence[Sequence[int]]] = None,
) -> SpanCertificate:
    """
    Decide whether target lies in the span of products of generators up to y^order.

    Args:
        target: Series to express
        generators: Building blocks
        order: Highest exponent compared
        max_degree: Products of up to this many generators are used when monomials is None
        monomials: Explicit products, as tuples of generator indices

    Returns:
        A certificate carrying the combination when ok, otherwise the first
        exponent at which no combination matches (the witness)
    """
    if order > target.order or any(order > g.order for g in generators):
        raise ValueError(f"order {order} exceeds the truncation of an input series")
    if monomials is None:
        monomials = [
            combo
            for degree in range(1, max_degree + 1)
            for combo in itertools.combinations_with_replacement(range(len(generators)), degree)
        ]
    monomials = tuple(tuple(m) for m in monomials)

    columns = []
    for monomial in monomials:
        product = TruncatedSeries.from_function(order, lambda n: 1 if n == 0 else 0)
        for index in monomial:
            product = product * generators[index].truncate(order)
        columns.append(product)
    matrix = sympy.Matrix(order + 1, len(columns), lambda i, j: _rational(columns[j].coefficients[i]))
    rhs = sympy.Matrix(order + 1, 1, lambda i, _: _rational(target.coefficients[i]))

    try:
        solution, params = matrix.gauss_jordan_solve(rhs)
    except ValueError:
        low, high = 0, order
        while low < high:
            middle = (low + high) // 2
            if _consistent(matrix, rhs, middle + 1):
                low = middle + 1
            else:
                high = middle
        logger.info(f"Span check failed first at y^{low}")
        return SpanCertificate(False, monomials, None, low, order)

    solution = solution.subs({p: 0 for p in params})
    combination = tuple(Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in solution)
    return SpanCertificate(True, monomials, combination, None, order)


def _factor_expansions(factorizations: Sequence[FactorizedSeries], order: int) -> Tuple[List[SeriesFactor], List[Tuple[int, ...]]]:
    distinct = sorted({f for fs in factorizations for f in fs.factors})
    index = {f: i for i, f in enumerate(distinct)}
    monomials = sorted({tuple(sorted(index[f] for f in fs.factors)) for fs in factorizations})
    return distinct, monomials


def assembled_span_check(req: SeriesRequest, jobs: Optional[int] = None) -> SpanCertificate:
    """Check the assembled series against the factor products that occur in its shapes"""
    target = generating_series(req, jobs)
    shapes = enumerate_weighted_shapes(req.surface, req.genus, req.profile)
    factorizations = [
        f for f in (factorized_form(s, req.surface, req.fixed, req.free, req.convention) for s in shapes)
        if not f.is_zero()
    ]
    distinct, monomials = _factor_expansions(factorizations, req.order)
    if not monomials:
        witness = target.first_difference(TruncatedSeries.zero(req.order))
        return SpanCertificate(witness is None, (), () if witness is None else None, witness, req.order)
    generators = [f.expand(req.order) for f in distinct]
    return quasimodular_span_check(target, generators, req.order, monomials=monomials)
