"""
Regularity

The linear system A·w = d of a shape's extended graph, brute-force weighted
counting of its solutions, minor and cokernel analysis of A, and exact
quasi-polynomial fits of relative counts along rays of end values.

Extended graph conventions: one row per vertex and per end vertex v_e, one
column per bounded edge, per end and per ground edge e_G. Rows read
inflow - outflow, so an étage row is 0, a joint row encodes w1 - w2 = 0, a
ground row reads 2·e_G - outflow = -ε_G and an end row fixes the end value.
"""
from __future__ import annotations

import functools
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import sympy
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from config import TMOEBIUS_FIT_HOLDOUT, TMOEBIUS_MINOR_COLUMNS
from .core import Number, Partition, exact, format_number
from .diagram import FloorDiagram, SurfaceKind, VertexKind, aut_order
from .enumeration import cycle_vertices, enumerate_marking_patterns_for, enumerate_shapes, iter_edge_weightings
from .errors import ChamberCrossingError, RegularityFitError
from .multiplicity import ExponentConvention, InvariantRequest, multiplicity_numerator

logger = logging.getLogger("tmoebius.regularity")

Row = Tuple[str, int]
Column = Tuple[str, int]


@dataclass(frozen=True)
class ExtendedGraph:
    shape: FloorDiagram
    surface: SurfaceKind
    rows: Tuple[Row, ...]
    columns: Tuple[Column, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    ground_parity: Dict[int, int] = field(hash=False, compare=False, default_factory=dict)

    @property
    def shape_size(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)

    def divergence(self, end_values: Mapping[int, int]) -> Tuple[int, ...]:
        """The vector d for the given end values"""
        values = []
        for kind, ident in self.rows:
            if kind == "end":
                values.append(end_values[ident])
            elif ident in self.ground_parity:
                values.append(-self.ground_parity[ident])
            else:
                values.append(0)
        return tuple(values)

    def sympy_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.matrix)

    def endpoints(self, column: Column) -> Tuple[Row, ...]:
        j = self.columns.index(column)
        return tuple(row for i, row in enumerate(self.rows) if self.matrix[i][j])


def build_extended(shape: FloorDiagram, surface: SurfaceKind) -> ExtendedGraph:
    """
    Extended graph of a shape carrying floor degrees.

    Raises:
        ValueError: when a floor degree is missing (ε_G depends on it)
    """
    if any(v.degree is None for v in shape.floors):
        raise ValueError("the extended graph needs floor degrees")
    rows: List[Row] = [("vertex", v.id) for v in shape.vertices] + [("end", e.id) for e in shape.ends]
    columns: List[Column] = (
        [("edge", e.id) for e in shape.edges]
        + [("end", e.id) for e in shape.ends]
        + [("ground", g.id) for g in shape.ground_floors]
    )
    row_index = {row: i for i, row in enumerate(rows)}
    column_index = {column: j for j, column in enumerate(columns)}
    matrix = [[0] * len(columns) for _ in rows]

    joint_sign: Dict[Column, int] = {}
    for joint in shape.joints:
        for sign, cell in zip((1, -1), sorted(shape.outgoing_elevators(joint.id))):
            joint_sign[cell] = sign

    def tail_entry(column: Column, tail: int) -> None:
        value = joint_sign.get(column, 0) if shape.vertex_map[tail].kind is VertexKind.JOINT else -1
        matrix[row_index[("vertex", tail)]][column_index[column]] = value

    for e in shape.edges:
        column = ("edge", e.id)
        matrix[row_index[("vertex", e.head)]][column_index[column]] = 1
        tail_entry(column, e.tail)
    for e in shape.ends:
        column = ("end", e.id)
        matrix[row_index[("end", e.id)]][column_index[column]] = 1
        tail_entry(column, e.source)
    for g in shape.ground_floors:
        matrix[row_index[("vertex", g.id)]][column_index[("ground", g.id)]] = 2

    parity = {g.id: surface.delta * g.degree.doubled % 2 for g in shape.ground_floors}
    return ExtendedGraph(shape, surface, tuple(rows), tuple(columns), tuple(tuple(r) for r in matrix), parity)


def iter_weight_vectors(eg: ExtendedGraph, end_values: Mapping[int, int]) -> Iterator[Tuple[int, ...]]:
    """Solutions of A·w = d with elevator entries ≥ 1 and e_G entries ≥ 0, in column order"""
    shape = eg.shape
    d = eg.divergence(end_values)
    for edge_weights in iter_edge_weightings(shape, end_values):
        values: Dict[Column, int] = {("edge", i): w for i, w in edge_weights.items()}
        values.update({("end", i): end_values[i] for i in (e.id for e in shape.ends)})
        feasible = True
        for g in shape.ground_floors:
            outflow = sum(edge_weights[e.id] for e in shape.out_edges(g.id)) + sum(end_values[e.id] for e in shape.ends_at(g.id))
            rest = outflow - eg.ground_parity[g.id]
            if rest < 0 or rest % 2:
                feasible = False
                break
            values[("ground", g.id)] = rest // 2
        if not feasible:
            continue
        vector = tuple(values[c] for c in eg.columns)
        if all(sum(a * w for a, w in zip(row, vector)) == target for row, target in zip(eg.matrix, d)):
            yield vector


def count_weightings(eg: ExtendedGraph, end_values: Mapping[int, int], monomial: Optional[Mapping[Column, int]] = None) -> Number:
    """Σ over solutions of ∏ w_c^{monomial[c]}; the plain count without a monomial"""
    total = 0
    for vector in iter_weight_vectors(eg, end_values):
        term = 1
        if monomial:
            for column, value in zip(eg.columns, vector):
                term *= value ** monomial.get(column, 0)
        total += term
    return total


# ---------------------------------------------------------------------------
# Minors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinorComponent:
    kind: str  # "ground_tree", "cycle" or "unbalanced"
    rows: Tuple[Row, ...]
    columns: Tuple[Column, ...]
    joints_on_cycle: int = 0
    determinant: int = 0

    @property
    def predicts_torsion(self) -> bool:
        return self.kind == "ground_tree" or (self.kind == "cycle" and self.joints_on_cycle % 2 == 1)


@dataclass(frozen=True)
class MinorReport:
    columns: Tuple[Column, ...]
    determinant: int
    components: Tuple[MinorComponent, ...] = ()
    cokernel: Tuple[int, ...] = ()
    predicted: Tuple[int, ...] = ()

    @property
    def consistent(self) -> bool:
        """Nonzero minors split into ground trees and odd cycles, each of determinant ±2"""
        if self.determinant == 0:
            return True
        if any(not c.predicts_torsion or abs(c.determinant) != 2 for c in self.components):
            return False
        return abs(self.determinant) == 2 ** len(self.components) and self.cokernel == self.predicted

    def to_json(self) -> Dict[str, Any]:
        return {
            "columns": [f"{kind}:{ident}" for kind, ident in self.columns],
            "determinant": self.determinant,
            "components": [
                {"kind": c.kind, "joints_on_cycle": c.joints_on_cycle, "determinant": c.determinant}
                for c in self.components
            ],
            "cokernel": list(self.cokernel),
            "predicted": list(self.predicted),
            "consistent": self.consistent,
        }


def _cycle_joints(eg: ExtendedGraph, graph: nx.MultiGraph) -> int:
    kinds = eg.shape.vertex_map
    return sum(1 for kind, ident in cycle_vertices(graph) if kind == "vertex" and kinds[ident].kind is VertexKind.JOINT)


def _invariant_factors(block: sympy.Matrix) -> Tuple[int, ...]:
    normal = smith_normal_form(block, domain=ZZ)
    diagonal = [abs(int(normal[i, i])) for i in range(min(normal.shape))]
    return tuple(sorted(value for value in diagonal if value != 1))


def _analyse(eg: ExtendedGraph, full: sympy.Matrix, chosen: Tuple[int, ...]) -> MinorReport:
    columns = tuple(eg.columns[j] for j in chosen)
    sub = full.extract(list(range(len(eg.rows))), list(chosen))
    determinant = int(sub.det())
    if determinant == 0:
        return MinorReport(columns, 0)

    graph = nx.MultiGraph()
    graph.add_nodes_from(eg.rows)
    anchors: Dict[Row, List[Column]] = {}
    for column in columns:
        ends = eg.endpoints(column)
        if column[0] == "ground":
            anchors.setdefault(ends[0], []).append(column)
        else:
            graph.add_edge(ends[0], ends[1], key=column)

    components = []
    for nodes in sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0]):
        sub_graph = graph.subgraph(nodes)
        own_columns = [k for _, _, k in sub_graph.edges(keys=True)] + [c for n in nodes for c in anchors.get(n, [])]
        grounds = sum(len(anchors.get(n, [])) for n in nodes)
        block = full.extract([eg.rows.index(r) for r in nodes], [eg.columns.index(c) for c in own_columns])
        block_det = int(block.det()) if block.rows == block.cols else 0
        if len(own_columns) != len(nodes):
            kind, joints = "unbalanced", 0
        elif grounds == 1:
            kind, joints = "ground_tree", 0
        elif grounds == 0:
            kind, joints = "cycle", _cycle_joints(eg, sub_graph)
        else:
            kind, joints = "unbalanced", 0
        components.append(MinorComponent(kind, tuple(nodes), tuple(sorted(own_columns)), joints, block_det))

    predicted = (2,) * sum(1 for c in components if c.predicts_torsion)
    return MinorReport(columns, determinant, tuple(components), _invariant_factors(sub), predicted)


def minor_analysis(eg: ExtendedGraph, max_columns: Optional[int] = None) -> List[MinorReport]:
    """
    Every maximal square minor of A, one report per column subset.

    Raises:
        ValueError: when A has more columns than max_columns
    """
    max_columns = TMOEBIUS_MINOR_COLUMNS if max_columns is None else max_columns
    n_rows, n_columns = eg.shape_size
    if n_columns > max_columns:
        raise ValueError(f"{n_columns} columns exceed the exhaustive bound {max_columns}")
    full = eg.sympy_matrix()
    return [_analyse(eg, full, chosen) for chosen in itertools.combinations(range(n_columns), n_rows)]


def is_totally_unimodular(eg: ExtendedGraph) -> bool:
    """Every square submatrix has determinant -1, 0 or 1"""
    full = eg.sympy_matrix()
    n_rows, n_columns = eg.shape_size
    for size in range(1, min(n_rows, n_columns) + 1):
        for rows in itertools.combinations(range(n_rows), size):
            for columns in itertools.combinations(range(n_columns), size):
                if abs(full.extract(list(rows), list(columns)).det()) > 1:
                    return False
    return True


# ---------------------------------------------------------------------------
# Relative counts and quasi-polynomial fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleFamily:
    """The ray base + t·direction in the space of labeled end values"""
    base: Tuple[int, ...]
    direction: Tuple[int, ...]

    def __post_init__(self):
        if len(self.base) != len(self.direction):
            raise ValueError("base and direction need the same length")

    def point(self, t: int) -> Tuple[int, ...]:
        return tuple(b + t * d for b, d in zip(self.base, self.direction))

    def residue(self, t: int) -> Tuple[int, ...]:
        return tuple(x % 2 for x in self.point(t))


@dataclass(frozen=True)
class RelativeCount:
    """
    Labeled relative count of a set of shapes as a function of the end values.

    Entries 0..fixed_count-1 are fixed ends, the rest free. Every bijection of
    entries to end slots is summed and balanced by 1/|Aut shape|.
    """
    shapes: Tuple[FloorDiagram, ...]
    surface: SurfaceKind
    fixed_count: int
    convention: ExponentConvention = ExponentConvention.VAL_MINUS_ONE

    @functools.cached_property
    def extended(self) -> Tuple[ExtendedGraph, ...]:
        return tuple(build_extended(s, self.surface) for s in self.shapes)

    @property
    def n_ends(self) -> int:
        counts = {len(s.ends) for s in self.shapes}
        if len(counts) != 1:
            raise ValueError("shapes of a relative count must share their number of ends")
        return counts.pop()

    def degree_bound(self) -> int:
        """Bound on the polynomial degree: weightings plus multiplicity monomials"""
        return max((4 * len(s.edges) + 2 * len(s.ends) for s in self.shapes), default=0)

    def _assignments(self, shape: FloorDiagram) -> Iterator[Tuple[int, ...]]:
        """Permutations: slot i of shape.ends receives entry perm[i]"""
        return itertools.permutations(range(len(shape.ends)))

    def value(self, entries: Sequence[int]) -> Number:
        if len(entries) != self.n_ends:
            raise ValueError(f"expected {self.n_ends} entries, got {len(entries)}")
        total = Fraction(0)
        for shape, eg in zip(self.shapes, self.extended):
            aut = aut_order(shape)
            end_ids = [e.id for e in shape.ends]
            shape_total = 0
            by_fixed: Dict[frozenset, list] = {}
            for perm in self._assignments(shape):
                end_values = {end_ids[slot]: entries[entry] for slot, entry in enumerate(perm)}
                fixed_ends = frozenset(end_ids[slot] for slot, entry in enumerate(perm) if entry < self.fixed_count)
                if fixed_ends not in by_fixed:
                    by_fixed[fixed_ends] = enumerate_marking_patterns_for(shape, fixed_ends)
                patterns = by_fixed[fixed_ends]
                if not patterns:
                    continue
                for vector in iter_weight_vectors(eg, end_values):
                    weights = dict(zip(eg.columns, vector))
                    d = shape.with_weights(
                        {e.id: weights[("edge", e.id)] for e in shape.edges},
                        {e.id: weights[("end", e.id)] for e in shape.ends},
                    )
                    shape_total += sum(
                        p.extensions * multiplicity_numerator(d, p.cells, p.cycles, self.convention) for p in patterns
                    )
            total += Fraction(shape_total, aut)
        return exact(total)

    def pattern(self, entries: Sequence[int]) -> Tuple[Tuple[int, int, Column, str], ...]:
        """Per (shape, assignment, column): fixed, free or infeasible across the solutions"""
        signature = []
        for s_index, (shape, eg) in enumerate(zip(self.shapes, self.extended)):
            end_ids = [e.id for e in shape.ends]
            for p_index, perm in enumerate(self._assignments(shape)):
                end_values = {end_ids[slot]: entries[entry] for slot, entry in enumerate(perm)}
                seen: Dict[Column, set] = {c: set() for c in eg.columns}
                for vector in iter_weight_vectors(eg, end_values):
                    for column, value in zip(eg.columns, vector):
                        seen[column].add(value)
                for column in eg.columns:
                    values = seen[column]
                    status = "infeasible" if not values else "fixed" if len(values) == 1 else "free"
                    signature.append((s_index, p_index, column, status))
        return tuple(signature)


@dataclass(frozen=True)
class QuasiPolynomialFit:
    family: SampleFamily
    residue_classes: Dict[Tuple[int, ...], Tuple[Fraction, ...]]
    single_polynomial: Optional[Tuple[Fraction, ...]]
    degree_bound: int
    samples: int
    residual: int = 0

    @property
    def is_polynomial(self) -> bool:
        return self.single_polynomial is not None

    def evaluate(self, t: int) -> Number:
        coefficients = self.residue_classes[self.family.residue(t)]
        return exact(sum((c * t ** i for i, c in enumerate(coefficients)), Fraction(0)))

    def to_json(self) -> Dict[str, Any]:
        return {
            "chamber_ray": {"base": list(self.family.base), "direction": list(self.family.direction)},
            "residue_classes": [
                {"class": list(key), "coefficients": [format_number(c) for c in coefficients]}
                for key, coefficients in sorted(self.residue_classes.items())
            ],
            "single_polynomial": (
                [format_number(c) for c in self.single_polynomial] if self.single_polynomial is not None else None
            ),
            "degree_bound": self.degree_bound,
            "samples": self.samples,
            "residual": self.residual,
        }


_t = sympy.Symbol("t")


def _rational(value: Number) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _fit(points: Sequence[Tuple[int, Number]], max_degree: int, holdout: int) -> Optional[Tuple[Fraction, ...]]:
    """Lowest-degree polynomial through the points that also reproduces the holdout points"""
    for degree in range(0, max_degree + 1):
        if degree + 1 + holdout > len(points):
            break
        basis = [(x, _rational(y)) for x, y in points[: degree + 1]]
        polynomial = sympy.Poly(sympy.interpolate(basis, _t), _t)
        if all(polynomial.eval(x) == _rational(y) for x, y in points):
            coefficients = [Fraction(int(c.p), int(c.q)) for c in reversed(polynomial.all_coeffs())]
            return tuple(coefficients) if any(coefficients) else (Fraction(0),)
    return None


def fit_regularity(
    relative: RelativeCount,
    family: SampleFamily,
    degree_bound: Optional[int] = None,
    holdout: Optional[int] = None,
) -> QuasiPolynomialFit:
    """
    Exact quasi-polynomial fit of the relative count along a ray.

    Samples t = 0, 1, ... and fits one polynomial per mod-2 class of the
    entries, keeping holdout points per class for verification, then tries a
    single polynomial for the whole ray.

    Raises:
        ChamberCrossingError: the solution pattern changes within a class
        RegularityFitError: some class has no polynomial of degree ≤ the bound
    """
    bound = relative.degree_bound() if degree_bound is None else degree_bound
    holdout = TMOEBIUS_FIT_HOLDOUT if holdout is None else holdout
    count = 2 * (bound + 1 + holdout)

    points: Dict[Tuple[int, ...], List[Tuple[int, Number]]] = {}
    patterns: Dict[Tuple[int, ...], Tuple[int, tuple]] = {}
    samples = []
    for t in range(count):
        entries = family.point(t)
        if any(x < 1 for x in entries):
            raise ValueError(f"entries must stay positive along the ray, got {entries} at t={t}")
        residue = family.residue(t)
        signature = relative.pattern(entries)
        if residue in patterns and patterns[residue][1] != signature:
            first_t, reference = patterns[residue]
            wall = sorted({f"{now[2][0]}:{now[2][1]}" for ref, now in zip(reference, signature) if ref != now})
            raise ChamberCrossingError(
                f"solution pattern changes between t={first_t} and t={t} on columns {', '.join(wall)}"
            )
        patterns.setdefault(residue, (t, signature))
        value = relative.value(entries)
        points.setdefault(residue, []).append((t, value))
        samples.append((t, value))

    classes = {}
    for residue, class_points in sorted(points.items()):
        coefficients = _fit(class_points, bound, holdout)
        if coefficients is None:
            raise RegularityFitError(f"no polynomial of degree ≤ {bound} fits class {residue}")
        classes[residue] = coefficients
    single = _fit(samples, bound, holdout)
    logger.info(f"Fitted {len(classes)} residue classes from {count} samples; single polynomial: {single is not None}")
    return QuasiPolynomialFit(family, classes, single, bound, count)


def fixed_label_symmetry(fixed: Partition, free: Partition) -> int:
    """∏ over (weight, fixed or free) of (number of entries)!"""
    counts = Counter([(w, True) for w in fixed] + [(w, False) for w in free])
    return math.prod(math.factorial(c) for c in counts.values())


def invariant_via_weightings(req: InvariantRequest) -> Number:
    """N computed from degree-carrying shapes and their weightings"""
    req.validate()
    if not req.parity_ok():
        return 0
    shapes = enumerate_shapes(req.surface, req.genus, req.homology.a, req.profile.length())
    relative = RelativeCount(shapes, req.surface, req.fixed.length(), req.convention)
    entries = tuple(req.fixed.parts) + tuple(req.free.parts)
    return exact(Fraction(relative.value(entries)) / fixed_label_symmetry(req.fixed, req.free))
