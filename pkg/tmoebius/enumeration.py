"""
Enumeration

Exhaustive generation of floor diagrams up to isomorphism and of their
markings.

Diagrams are built in three layers: skeletons (vertex kinds, orientation,
end sources), weighted shapes (edge and end weights), and finally floor
degrees. Every layer is deduplicated by canonical form so the output is a
list of canonical representatives in canonical order.
"""
from __future__ import annotations

import functools
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
from sympy.utilities.iterables import multiset_permutations

from .core import HalfInt, Partition
from .diagram import (
    Edge, End, FloorDiagram, HomologyClass, SurfaceKind, Vertex, VertexKind,
    canonical_diagram, canonical_form, genus as diagram_genus,
)
from .errors import InvalidRequestError
from .workers import parallel_map, resolve_jobs

logger = logging.getLogger("tmoebius.enumeration")


# ---------------------------------------------------------------------------
# Skeletons and weighted shapes
# ---------------------------------------------------------------------------

def _connected(n_vertices: int, pairs: Sequence[Tuple[int, int]]) -> bool:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(n_vertices))
    graph.add_edges_from(pairs)
    return nx.is_connected(graph)


def _dedupe(diagrams: Iterator[FloorDiagram]) -> Tuple[FloorDiagram, ...]:
    seen: Dict[tuple, FloorDiagram] = {}
    for d in diagrams:
        code = canonical_form(d)
        if code not in seen:
            seen[code] = canonical_diagram(d)
    return tuple(seen[code] for code in sorted(seen))


def _skeletons_with(grounds: int, etages: int, joints: int, n_bounded: int, n_ends: int) -> Iterator[FloorDiagram]:
    n_vertices = grounds + etages + joints
    kinds = [VertexKind.GROUND] * grounds + [VertexKind.ETAGE] * etages + [VertexKind.JOINT] * joints
    etage_ids = range(grounds, grounds + etages)
    joint_ids = range(grounds + etages, n_vertices)
    floor_ids = range(grounds + etages)

    pairs = [
        (tail, head)
        for head in etage_ids
        for tail in range(n_vertices)
        if kinds[tail] is not VertexKind.ETAGE or tail < head
    ]
    vertices = tuple(Vertex(i, kind) for i, kind in enumerate(kinds))

    for chosen in itertools.combinations_with_replacement(pairs, n_bounded):
        out_degree = Counter(tail for tail, _ in chosen)
        if any(out_degree[j] > 2 for j in joint_ids):
            continue
        heads = {head for _, head in chosen}
        if any(e not in heads for e in etage_ids):
            continue
        if not _connected(n_vertices, chosen):
            continue
        joint_sources = [j for j in joint_ids for _ in range(2 - out_degree[j])]
        remaining = n_ends - len(joint_sources)
        if remaining < 0:
            continue
        edges = tuple(Edge(i, tail, head) for i, (tail, head) in enumerate(chosen))
        for floor_sources in itertools.combinations_with_replacement(floor_ids, remaining):
            ends_per_floor = Counter(floor_sources)
            if any(out_degree[f] + ends_per_floor[f] == 0 for f in floor_ids):
                continue
            sources = list(floor_sources) + joint_sources
            yield FloorDiagram(vertices, edges, tuple(End(i, s) for i, s in enumerate(sources)))


@functools.lru_cache(maxsize=None)
def enumerate_skeletons(genus: int, n_ends: int, max_joints: int) -> Tuple[FloorDiagram, ...]:
    """
    Weight- and degree-free skeletons of the given genus with n_ends ends.

    Floors number at most genus; a skeleton with J joints has genus + J - 1
    bounded edges, all heads are étages and joints have exactly two outgoing
    elevators.
    """
    if genus < 1 or n_ends < 1:
        return ()

    def generate() -> Iterator[FloorDiagram]:
        for floors in range(1, genus + 1):
            for grounds in range(floors + 1):
                for joints in range(max_joints + 1):
                    yield from _skeletons_with(grounds, floors - grounds, joints, genus + joints - 1, n_ends)

    skeletons = _dedupe(generate())
    logger.debug(f"{len(skeletons)} skeletons for genus {genus}, {n_ends} ends, ≤{max_joints} joints")
    return skeletons


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways of writing total as parts positive integers"""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _joint_partners(shape: FloorDiagram) -> Dict[Tuple[str, int], Tuple[str, int]]:
    partners = {}
    for joint in shape.joints:
        elevators = shape.outgoing_elevators(joint.id)
        if len(elevators) == 2:
            partners[elevators[0]] = elevators[1]
            partners[elevators[1]] = elevators[0]
    return partners


def _topological_etages(shape: FloorDiagram) -> List[int]:
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(v.id for v in shape.vertices)
    graph.add_edges_from((e.tail, e.head) for e in shape.edges)
    etage_ids = {v.id for v in shape.etages}
    return [v for v in nx.lexicographical_topological_sort(graph) if v in etage_ids]


def iter_edge_weightings(shape: FloorDiagram, end_weights: Mapping[int, int]) -> Iterator[Dict[int, int]]:
    """
    Every bounded-edge weighting satisfying (B) and (C) for fixed end weights.

    Étages are visited from the top of the order down; the known outflow of
    each étage is split over its incoming edges. Ground floor parity is left
    to the caller.
    """
    order = list(reversed(_topological_etages(shape)))
    partners = _joint_partners(shape)

    def joint_consistent(assigned: Dict[int, int], edge_ids: Sequence[int]) -> bool:
        for edge_id in edge_ids:
            partner = partners.get(("edge", edge_id))
            if partner is None:
                continue
            kind, partner_id = partner
            other = end_weights.get(partner_id) if kind == "end" else assigned.get(partner_id)
            if other is not None and other != assigned[edge_id]:
                return False
        return True

    def visit(index: int, assigned: Dict[int, int]) -> Iterator[Dict[int, int]]:
        if index == len(order):
            yield dict(assigned)
            return
        etage = order[index]
        outflow = sum(assigned[e.id] for e in shape.out_edges(etage)) + sum(end_weights[e.id] for e in shape.ends_at(etage))
        incoming = [e.id for e in shape.in_edges(etage)]
        for parts in _compositions(outflow, len(incoming)):
            extended = dict(assigned)
            extended.update(zip(incoming, parts))
            if joint_consistent(extended, incoming):
                yield from visit(index + 1, extended)

    yield from visit(0, {})


def _joints_balanced(d: FloorDiagram) -> bool:
    for joint in d.joints:
        weights = [e.weight for e in d.out_edges(joint.id)] + [e.weight for e in d.ends_at(joint.id)]
        if len(weights) != 2 or weights[0] != weights[1]:
            return False
    return True


def _weighted_from_skeleton(skeleton: FloorDiagram, surface: SurfaceKind, profile: Partition) -> Iterator[FloorDiagram]:
    end_ids = [e.id for e in skeleton.ends]
    for assignment in multiset_permutations(list(profile.parts)):
        end_weights = dict(zip(end_ids, assignment))
        for edge_weights in iter_edge_weightings(skeleton, end_weights):
            d = skeleton.with_weights(edge_weights, end_weights)
            if not _joints_balanced(d):
                continue
            if surface is SurfaceKind.M0 and any(d.outflow(g.id) % 2 for g in d.ground_floors):
                continue
            yield d


@functools.lru_cache(maxsize=None)
def enumerate_weighted_shapes(surface: SurfaceKind, genus: int, profile: Partition) -> Tuple[FloorDiagram, ...]:
    """Degree-free weighted shapes with the given end weights, up to isomorphism"""
    n_ends = profile.length()
    if genus < 1 or n_ends == 0:
        return ()
    max_joints = min(profile.norm() // 2, genus - 1 + n_ends)
    skeletons = enumerate_skeletons(genus, n_ends, max_joints)
    shapes = _dedupe(d for s in skeletons for d in _weighted_from_skeleton(s, surface, profile))
    logger.info(f"{len(shapes)} weighted shapes on {surface} for genus {genus}, profile {profile}")
    return shapes


def _degree_vectors(shape: FloorDiagram, surface: SurfaceKind, doubled_total: int) -> Iterator[Dict[int, HalfInt]]:
    """Floor degrees (doubled) summing to doubled_total, respecting minimum degrees and ground parity"""
    floors = shape.floors

    def allowed(vertex: Vertex, doubled: int) -> bool:
        if vertex.kind is VertexKind.ETAGE:
            return doubled >= 2 and doubled % 2 == 0
        if doubled < 1:
            return False
        if shape.is_weighted:
            return shape.outflow(vertex.id) % 2 == surface.delta * doubled % 2
        return True

    def visit(index: int, remaining: int, chosen: Dict[int, HalfInt]) -> Iterator[Dict[int, HalfInt]]:
        if index == len(floors):
            if remaining == 0:
                yield dict(chosen)
            return
        vertex = floors[index]
        for doubled in range(1, remaining + 1):
            if allowed(vertex, doubled):
                chosen[vertex.id] = HalfInt(doubled)
                yield from visit(index + 1, remaining - doubled, chosen)
                del chosen[vertex.id]

    yield from visit(0, doubled_total, {})


@functools.lru_cache(maxsize=None)
def enumerate_shapes(surface: SurfaceKind, genus: int, a: HalfInt, n_ends: int) -> Tuple[FloorDiagram, ...]:
    """Weight-free shapes carrying floor degrees that sum to a"""
    if genus < 1 or n_ends < 1:
        return ()
    skeletons = enumerate_skeletons(genus, n_ends, genus - 1 + n_ends)
    return _dedupe(
        s.with_degrees(degrees)
        for s in skeletons
        for degrees in _degree_vectors(s, surface, a.doubled)
    )


def check_request(surface: SurfaceKind, genus: int, cls: HomologyClass, profile: Partition) -> List[str]:
    """Reasons why (surface, genus, class, profile) cannot be enumerated"""
    problems = []
    if genus < 1:
        problems.append(f"genus must be at least 1, got {genus}")
    if cls.a.doubled < 1:
        problems.append(f"a must be at least 1/2, got {cls.a}")
    if cls.b.doubled < 1:
        problems.append(f"b must be at least 1/2, got {cls.b}")
    if profile.norm() != cls.b.doubled:
        problems.append(f"‖profile‖ = {profile.norm()} differs from 2b = {cls.b.doubled}")
    if not cls.parity_ok(surface):
        problems.append(f"2b ≡ 2δa mod 2 fails for δ={surface.delta}, class {cls}")
    return problems


def _diagrams_for_shape(shape: FloorDiagram, surface: SurfaceKind, doubled_total: int) -> Tuple[FloorDiagram, ...]:
    return _dedupe(shape.with_degrees(degrees) for degrees in _degree_vectors(shape, surface, doubled_total))


def iter_diagrams(
    surface: SurfaceKind,
    genus: int,
    cls: HomologyClass,
    profile: Partition,
    jobs: Optional[int] = None,
) -> Iterator[FloorDiagram]:
    """
    Stream the floor diagrams of the given genus, class and tangency profile.

    Weighted shapes are expanded in chunks of a few shapes per worker, and
    each chunk is yielded before the next one is computed. Diagrams from
    different weighted shapes are never isomorphic, so the stream has no
    repeats; it runs shape by shape, each shape's diagrams in canonical order.

    Raises:
        InvalidRequestError: when the request breaks one of the relations of enumerate_diagrams
    """
    problems = check_request(surface, genus, cls, profile)
    if problems:
        raise InvalidRequestError("; ".join(problems))
    shapes = enumerate_weighted_shapes(surface, genus, profile)
    task = functools.partial(_diagrams_for_shape, surface=surface, doubled_total=cls.a.doubled)
    chunk = 4 * resolve_jobs(jobs)
    for start in range(0, len(shapes), chunk):
        for batch in parallel_map(task, shapes[start:start + chunk], jobs):
            yield from batch


def enumerate_diagrams(
    surface: SurfaceKind,
    genus: int,
    cls: HomologyClass,
    profile: Partition,
    jobs: Optional[int] = None,
) -> List[FloorDiagram]:
    """
    All floor diagrams of the given genus, class and tangency profile.

    Args:
        surface: TM0 or TM1
        genus: Genus g ≥ 1
        cls: Homology class aE + bF
        profile: End weights, ‖profile‖ = 2b
        jobs: Worker processes; shapes are split across them

    Returns:
        Canonical representatives sorted by canonical form

    Raises:
        InvalidRequestError: when the request breaks one of the relations above
    """
    diagrams = sorted(iter_diagrams(surface, genus, cls, profile, jobs), key=canonical_form)
    logger.info(f"{len(diagrams)} diagrams on {surface}, genus {genus}, class {cls}, profile {profile}")
    return diagrams


# ---------------------------------------------------------------------------
# Markings
# ---------------------------------------------------------------------------

class Cell(NamedTuple):
    """A markable element: ("etage", vertex id), ("edge", edge id) or ("end", end id)"""
    kind: str
    id: int

    def __str__(self) -> str:
        return f"{self.kind}:{self.id}"


def order_relation(d: FloorDiagram) -> Dict[Cell, FrozenSet[Cell]]:
    """For every cell, the cells strictly above it in ≺"""
    graph = nx.DiGraph()
    node = {}
    for v in d.vertices:
        node[v.id] = Cell("etage", v.id) if v.kind is VertexKind.ETAGE else ("vertex", v.id)
        graph.add_node(node[v.id])
    for e in d.edges:
        cell = Cell("edge", e.id)
        graph.add_edge(node[e.tail], cell)
        graph.add_edge(cell, node[e.head])
    for e in d.ends:
        graph.add_edge(node[e.source], Cell("end", e.id))
    return {
        n: frozenset(c for c in nx.descendants(graph, n) if isinstance(c, Cell))
        for n in graph.nodes
        if isinstance(n, Cell)
    }


def count_linear_extensions(cells: Sequence[Cell], above: Mapping[Cell, FrozenSet[Cell]]) -> int:
    """Number of labelings 1..n of cells increasing along ≺"""
    cells = list(cells)
    index = {c: i for i, c in enumerate(cells)}
    below_mask = [0] * len(cells)
    for c in cells:
        for upper in above[c]:
            if upper in index:
                below_mask[index[upper]] |= 1 << index[c]
    full = (1 << len(cells)) - 1
    ways = [0] * (full + 1)
    ways[0] = 1
    for placed in range(full + 1):
        if not ways[placed]:
            continue
        for i in range(len(cells)):
            bit = 1 << i
            if not placed & bit and below_mask[i] & placed == below_mask[i]:
                ways[placed | bit] += ways[placed]
    return ways[full]


def iter_linear_extensions(cells: Sequence[Cell], above: Mapping[Cell, FrozenSet[Cell]]) -> Iterator[Tuple[Cell, ...]]:
    cells = sorted(cells)

    def visit(prefix: Tuple[Cell, ...], rest: Tuple[Cell, ...]) -> Iterator[Tuple[Cell, ...]]:
        if not rest:
            yield prefix
            return
        for c in rest:
            if any(c in above[other] for other in rest if other != c):
                continue
            yield from visit(prefix + (c,), tuple(x for x in rest if x != c))

    yield from visit((), tuple(cells))


class ComponentTag(Enum):
    GROUND_FLOOR = "ground_floor"
    FREE_END = "free_end"
    ODD_JOINT_CYCLE = "odd_joint_cycle"
    INVALID = "invalid"


@dataclass(frozen=True)
class ComponentType:
    tag: ComponentTag
    vertices: Tuple[int, ...]
    reason: Optional[str] = None

    @property
    def is_valid(self) -> bool:
        return self.tag is not ComponentTag.INVALID

    def __str__(self) -> str:
        if self.reason:
            return f"{self.tag.value}({self.reason})"
        return self.tag.value


@dataclass(frozen=True)
class ComplementReport:
    components: Tuple[ComponentType, ...]
    odd_cycles: int

    @property
    def valid(self) -> bool:
        return all(c.is_valid for c in self.components)


def cycle_vertices(graph: nx.MultiGraph) -> List:
    """Vertices on the cycle of a connected unicyclic multigraph; two parallel edges form a cycle"""
    return [tail for tail, *_ in nx.find_cycle(graph)]


def classify_components(d: FloorDiagram, marked_cells) -> ComplementReport:
    """
    Classify the components left after cutting every marked elevator.

    A component is valid when it holds exactly one ground floor, exactly one
    unmarked end, or exactly one cycle through an odd number of joints, and
    nothing else of those three kinds.
    """
    marked = {Cell(*c) for c in marked_cells}
    graph = nx.MultiGraph()
    graph.add_nodes_from(v.id for v in d.vertices)
    graph.add_edges_from((e.tail, e.head) for e in d.edges if Cell("edge", e.id) not in marked)
    free_ends = Counter(e.source for e in d.ends if Cell("end", e.id) not in marked)

    components = []
    odd_cycles = 0
    for nodes in sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0]):
        sub = graph.subgraph(nodes)
        grounds = sum(1 for v in nodes if d.vertex_map[v].kind is VertexKind.GROUND)
        ends = sum(free_ends[v] for v in nodes)
        cycles = sub.number_of_edges() - len(nodes) + 1
        members = tuple(nodes)
        if cycles == 0 and grounds == 1 and ends == 0:
            components.append(ComponentType(ComponentTag.GROUND_FLOOR, members))
        elif cycles == 0 and grounds == 0 and ends == 1:
            components.append(ComponentType(ComponentTag.FREE_END, members))
        elif cycles == 1 and grounds == 0 and ends == 0:
            joints = sum(1 for v in cycle_vertices(sub) if d.vertex_map[v].kind is VertexKind.JOINT)
            if joints % 2:
                components.append(ComponentType(ComponentTag.ODD_JOINT_CYCLE, members))
                odd_cycles += 1
            else:
                components.append(ComponentType(ComponentTag.INVALID, members, f"cycle through {joints} joints"))
        else:
            components.append(ComponentType(
                ComponentTag.INVALID, members,
                f"{grounds} ground floors, {ends} free ends, {cycles} cycles",
            ))
    return ComplementReport(tuple(components), odd_cycles)


@dataclass(frozen=True)
class MarkingPattern:
    """A set of marked cells valid for condition (c), with its labelings counted"""
    fixed_ends: FrozenSet[int]
    cells: FrozenSet[Cell]
    cycles: int
    extensions: int


@dataclass(frozen=True)
class Marking:
    diagram: FloorDiagram
    placements: Tuple[Cell, ...]
    fixed_ends: FrozenSet[int] = frozenset()

    @property
    def n(self) -> int:
        return len(self.placements)

    @property
    def cells(self) -> FrozenSet[Cell]:
        return frozenset(self.placements)

    def label_of(self, cell: Cell) -> Optional[int]:
        try:
            return self.placements.index(cell) + 1
        except ValueError:
            return None


def marking_size(d: FloorDiagram) -> int:
    """|fixed| + |free| + g - 1"""
    return len(d.ends) + diagram_genus(d) - 1


def enumerate_marking_patterns_for(d: FloorDiagram, fixed_ends: FrozenSet[int]) -> List[MarkingPattern]:
    """Marked cell sets where the given ends are marked and condition (c) holds"""
    n = marking_size(d)
    required = [Cell("etage", v.id) for v in d.etages] + [Cell("end", i) for i in sorted(fixed_ends)]
    optional = [Cell("edge", e.id) for e in d.edges] + [Cell("end", e.id) for e in d.ends if e.id not in fixed_ends]
    extra = n - len(required)
    if extra < 0 or extra > len(optional):
        return []
    above = order_relation(d)
    patterns = []
    for chosen in itertools.combinations(optional, extra):
        cells = required + list(chosen)
        report = classify_components(d, cells)
        if not report.valid:
            continue
        patterns.append(MarkingPattern(
            frozenset(fixed_ends), frozenset(cells), report.odd_cycles, count_linear_extensions(cells, above)
        ))
    return patterns


def fixed_end_assignments(d: FloorDiagram, fixed: Partition) -> List[FrozenSet[int]]:
    """Every way of choosing ends of matching weights to carry the fixed parts"""
    per_weight = []
    for weight, count in fixed.multiplicities().items():
        candidates = [e.id for e in d.ends if e.weight == weight]
        per_weight.append(list(itertools.combinations(candidates, count)))
    return [frozenset(i for group in choice for i in group) for choice in itertools.product(*per_weight)]


def enumerate_marking_patterns(d: FloorDiagram, fixed: Partition, free: Partition) -> List[MarkingPattern]:
    if fixed + free != Partition(tuple(e.weight for e in d.ends)):
        raise ValueError(f"fixed {fixed} and free {free} do not make up the tangency profile of the diagram")
    return [p for assignment in fixed_end_assignments(d, fixed) for p in enumerate_marking_patterns_for(d, assignment)]


def enumerate_markings(d: FloorDiagram, fixed: Partition, free: Partition) -> List[Marking]:
    """All markings of d, with every choice of ends carrying the fixed parts"""
    above = order_relation(d)
    return [
        Marking(d, placements, pattern.fixed_ends)
        for pattern in enumerate_marking_patterns(d, fixed, free)
        for placements in iter_linear_extensions(sorted(pattern.cells), above)
    ]
