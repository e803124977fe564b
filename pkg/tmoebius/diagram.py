"""
Floor Diagrams

Data model for floor diagrams on the tropical Möbius strips: ground floors,
étages and joints joined by weighted elevators, validation of conditions
(A)-(C), derived invariants, canonical forms, automorphism counts and the
JSON exchange format.

The same FloorDiagram type carries degree-free shapes (degree None) and
weight-free shapes (weight None).
"""
from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .core import HalfInt, Partition
from .errors import DiagramStructureError


class SurfaceKind(Enum):
    """The two tropical Möbius strips, indexed by δ"""
    M0 = 0
    M1 = 1

    @property
    def delta(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value: Any) -> SurfaceKind:
        if isinstance(value, SurfaceKind):
            return value
        text = str(value).strip().lower()
        if text in ("m0", "0"):
            return cls.M0
        if text in ("m1", "1"):
            return cls.M1
        raise ValueError(f"unknown surface {value!r}, expected m0 or m1")

    def __str__(self) -> str:
        return f"m{self.value}"


class VertexKind(Enum):
    GROUND = "ground"
    ETAGE = "etage"
    JOINT = "joint"


_KIND_RANK = {VertexKind.GROUND: 0, VertexKind.ETAGE: 1, VertexKind.JOINT: 2}


@dataclass(frozen=True)
class HomologyClass:
    """The class aE + bF"""
    a: HalfInt
    b: HalfInt

    @classmethod
    def parse(cls, a: Any, b: Any) -> HomologyClass:
        return cls(HalfInt.parse(a), HalfInt.parse(b))

    def parity_ok(self, surface: SurfaceKind) -> bool:
        """2b ≡ 2δa mod 2"""
        return (self.b.doubled - surface.delta * self.a.doubled) % 2 == 0

    def __str__(self) -> str:
        return f"{self.a}E+{self.b}F"


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: VertexKind
    degree: Optional[HalfInt] = None

    @property
    def is_floor(self) -> bool:
        return self.kind is not VertexKind.JOINT


@dataclass(frozen=True)
class Edge:
    """Bounded elevator oriented tail → head"""
    id: int
    tail: int
    head: int
    weight: Optional[int] = None


@dataclass(frozen=True)
class End:
    """Infinite elevator leaving its source"""
    id: int
    source: int
    weight: Optional[int] = None


@dataclass(frozen=True)
class Violation:
    condition: str
    element: str
    message: str

    @property
    def is_structural(self) -> bool:
        return self.condition == "structure"

    def __str__(self) -> str:
        return f"[{self.condition}] {self.element}: {self.message}"


@dataclass(frozen=True)
class FloorDiagram:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...] = ()
    ends: Tuple[End, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        object.__setattr__(self, "ends", tuple(sorted(self.ends, key=lambda e: e.id)))

    @functools.cached_property
    def vertex_map(self) -> Dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @functools.cached_property
    def _incidence(self) -> Dict[int, Tuple[List[Edge], List[Edge], List[End]]]:
        table = {v.id: ([], [], []) for v in self.vertices}
        for edge in self.edges:
            if edge.tail in table:
                table[edge.tail][0].append(edge)
            if edge.head in table:
                table[edge.head][1].append(edge)
        for end in self.ends:
            if end.source in table:
                table[end.source][2].append(end)
        return table

    def out_edges(self, vertex_id: int) -> List[Edge]:
        return self._incidence[vertex_id][0]

    def in_edges(self, vertex_id: int) -> List[Edge]:
        return self._incidence[vertex_id][1]

    def ends_at(self, vertex_id: int) -> List[End]:
        return self._incidence[vertex_id][2]

    def vertices_of(self, kind: VertexKind) -> Tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if v.kind is kind)

    @property
    def ground_floors(self) -> Tuple[Vertex, ...]:
        return self.vertices_of(VertexKind.GROUND)

    @property
    def etages(self) -> Tuple[Vertex, ...]:
        return self.vertices_of(VertexKind.ETAGE)

    @property
    def joints(self) -> Tuple[Vertex, ...]:
        return self.vertices_of(VertexKind.JOINT)

    @property
    def floors(self) -> Tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if v.is_floor)

    def outflow(self, vertex_id: int) -> int:
        """Total weight leaving a vertex through bounded edges and ends"""
        return sum(e.weight for e in self.out_edges(vertex_id)) + sum(e.weight for e in self.ends_at(vertex_id))

    def inflow(self, vertex_id: int) -> int:
        return sum(e.weight for e in self.in_edges(vertex_id))

    def adjacent_weights(self, vertex_id: int) -> Tuple[int, ...]:
        """Weights of every elevator touching the vertex"""
        return tuple(
            [e.weight for e in self.in_edges(vertex_id)]
            + [e.weight for e in self.out_edges(vertex_id)]
            + [e.weight for e in self.ends_at(vertex_id)]
        )

    def valence(self, vertex_id: int) -> int:
        return len(self.in_edges(vertex_id)) + len(self.out_edges(vertex_id)) + len(self.ends_at(vertex_id))

    def outgoing_elevators(self, vertex_id: int) -> List[Tuple[str, int]]:
        """Outgoing elevators as ("edge", id) / ("end", id) cells"""
        return [("edge", e.id) for e in self.out_edges(vertex_id)] + [("end", e.id) for e in self.ends_at(vertex_id)]

    @property
    def is_weighted(self) -> bool:
        return all(e.weight is not None for e in self.edges) and all(e.weight is not None for e in self.ends)

    def with_weights(self, edge_weights: Mapping[int, int], end_weights: Optional[Mapping[int, int]] = None) -> FloorDiagram:
        end_weights = end_weights or {}
        return FloorDiagram(
            self.vertices,
            tuple(replace(e, weight=edge_weights.get(e.id, e.weight)) for e in self.edges),
            tuple(replace(e, weight=end_weights.get(e.id, e.weight)) for e in self.ends),
        )

    def with_degrees(self, degrees: Mapping[int, HalfInt]) -> FloorDiagram:
        return FloorDiagram(
            tuple(replace(v, degree=degrees.get(v.id, v.degree)) for v in self.vertices),
            self.edges,
            self.ends,
        )

    def without_weights(self) -> FloorDiagram:
        return FloorDiagram(
            self.vertices,
            tuple(replace(e, weight=None) for e in self.edges),
            tuple(replace(e, weight=None) for e in self.ends),
        )

    def without_degrees(self) -> FloorDiagram:
        return FloorDiagram(tuple(replace(v, degree=None) for v in self.vertices), self.edges, self.ends)

    def relabeled(self, vertex_ids: Mapping[int, int], edge_ids: Mapping[int, int], end_ids: Mapping[int, int]) -> FloorDiagram:
        return FloorDiagram(
            tuple(replace(v, id=vertex_ids[v.id]) for v in self.vertices),
            tuple(replace(e, id=edge_ids[e.id], tail=vertex_ids[e.tail], head=vertex_ids[e.head]) for e in self.edges),
            tuple(replace(e, id=end_ids[e.id], source=vertex_ids[e.source]) for e in self.ends),
        )

    @functools.cached_property
    def canonical(self) -> Tuple[tuple, Tuple[int, ...], int]:
        return _canonical_search(self)


def _structural_violations(d: FloorDiagram) -> List[Violation]:
    violations = []
    for label, ids in (("vertex", [v.id for v in d.vertices]),
                       ("edge", [e.id for e in d.edges]),
                       ("end", [e.id for e in d.ends])):
        for item, count in Counter(ids).items():
            if count > 1:
                violations.append(Violation("structure", f"{label} {item}", f"id used {count} times"))
    known = set(d.vertex_map)
    for edge in d.edges:
        for role, ref in (("tail", edge.tail), ("head", edge.head)):
            if ref not in known:
                violations.append(Violation("structure", f"edge {edge.id}", f"{role} refers to unknown vertex {ref}"))
    for end in d.ends:
        if end.source not in known:
            violations.append(Violation("structure", f"end {end.id}", f"source refers to unknown vertex {end.source}"))
    return violations


def validate(d: FloorDiagram, surface: SurfaceKind) -> List[Violation]:
    """
    Check a diagram against the floor diagram conditions.

    Args:
        d: The diagram
        surface: The strip the diagram is meant for (fixes δ in condition (A))

    Returns:
        Every violation found; an empty list means the diagram is valid.
        Structural problems (dangling or repeated ids) are reported on their own.
    """
    structural = _structural_violations(d)
    if structural:
        return structural

    violations: List[Violation] = []
    for vertex in d.vertices:
        element = f"{vertex.kind.value} {vertex.id}"
        if vertex.kind is VertexKind.JOINT:
            if vertex.degree is not None:
                violations.append(Violation("degree", element, "joints carry no degree"))
        elif vertex.degree is None:
            violations.append(Violation("degree", element, "floor degree missing"))
        elif vertex.kind is VertexKind.ETAGE and (not vertex.degree.is_integer() or vertex.degree.doubled < 2):
            violations.append(Violation("degree", element, f"étage degree must be a positive integer, got {vertex.degree}"))
        elif vertex.kind is VertexKind.GROUND and vertex.degree.doubled < 1:
            violations.append(Violation("degree", element, f"ground floor degree must be at least 1/2, got {vertex.degree}"))

    for label, items in (("edge", d.edges), ("end", d.ends)):
        for item in items:
            if item.weight is None or item.weight < 1:
                violations.append(Violation("weight", f"{label} {item.id}", f"weight must be a positive integer, got {item.weight}"))
    if violations:
        return violations

    for ground in d.ground_floors:
        element = f"ground {ground.id}"
        if d.in_edges(ground.id):
            violations.append(Violation("A", element, "ground floors have no incoming edges"))
        total = d.outflow(ground.id)
        expected = surface.delta * ground.degree.doubled % 2
        if total % 2 != expected:
            violations.append(Violation("A", element, f"adjacent weight {total} is not ≡ {expected} mod 2"))
    for etage in d.etages:
        incoming, outgoing = d.inflow(etage.id), d.outflow(etage.id)
        if incoming != outgoing:
            violations.append(Violation("B", f"etage {etage.id}", f"incoming weight {incoming} differs from outgoing {outgoing}"))
    for joint in d.joints:
        element = f"joint {joint.id}"
        if d.in_edges(joint.id):
            violations.append(Violation("C", element, "joints have no incoming edges"))
        weights = [e.weight for e in d.out_edges(joint.id)] + [e.weight for e in d.ends_at(joint.id)]
        if len(weights) != 2:
            violations.append(Violation("C", element, f"joints need exactly two outgoing elevators, found {len(weights)}"))
        elif weights[0] != weights[1]:
            violations.append(Violation("C", element, f"outgoing weights {weights[0]} and {weights[1]} differ"))

    directed = nx.MultiDiGraph()
    directed.add_nodes_from(d.vertex_map)
    directed.add_edges_from((e.tail, e.head) for e in d.edges)
    if not nx.is_directed_acyclic_graph(directed):
        violations.append(Violation("acyclic", "diagram", "the oriented graph has a directed cycle"))
    if d.vertices and not nx.is_weakly_connected(directed):
        violations.append(Violation("connected", "diagram", "vertices and bounded edges do not form a connected graph"))
    if not d.vertices:
        violations.append(Violation("connected", "diagram", "no vertices"))
    if not d.ends:
        violations.append(Violation("ends", "diagram", "at least one end is required"))
    return violations


def is_valid(d: FloorDiagram, surface: SurfaceKind) -> bool:
    return not validate(d, surface)


def genus(d: FloorDiagram) -> int:
    """First Betti number plus the number of floors"""
    return len(d.edges) - len(d.vertices) + 1 + len(d.floors)


def homology_class(d: FloorDiagram) -> HomologyClass:
    a = sum((v.degree.doubled for v in d.floors), 0)
    return HomologyClass(HalfInt(a), HalfInt(sum(e.weight for e in d.ends)))


def tangency_profile(d: FloorDiagram) -> Partition:
    return Partition(tuple(e.weight for e in d.ends))


def _w(value: Optional[int]) -> int:
    return 0 if value is None else value


def _vertex_label(d: FloorDiagram, v: Vertex) -> tuple:
    degree = v.degree.doubled if v.degree is not None else 0
    return (_KIND_RANK[v.kind], degree, tuple(sorted(_w(e.weight) for e in d.ends_at(v.id))))


def _ranks(values: Mapping[int, Any]) -> Dict[int, int]:
    order = {value: rank for rank, value in enumerate(sorted(set(values.values())))}
    return {key: order[value] for key, value in values.items()}


def _refined_colors(d: FloorDiagram) -> Dict[int, int]:
    colors = _ranks({v.id: _vertex_label(d, v) for v in d.vertices})
    while True:
        signatures = {
            v.id: (
                colors[v.id],
                tuple(sorted((colors[e.head], _w(e.weight)) for e in d.out_edges(v.id))),
                tuple(sorted((colors[e.tail], _w(e.weight)) for e in d.in_edges(v.id))),
            )
            for v in d.vertices
        }
        refined = _ranks(signatures)
        if len(set(refined.values())) == len(set(colors.values())):
            return refined
        colors = refined


def _canonical_search(d: FloorDiagram) -> Tuple[tuple, Tuple[int, ...], int]:
    """Minimal code over color-respecting vertex orders, a minimizing order, and how many orders attain it."""
    colors = _refined_colors(d)
    labels = {v.id: _vertex_label(d, v) for v in d.vertices}
    classes: Dict[int, List[int]] = {}
    for vertex_id, color in colors.items():
        classes.setdefault(color, []).append(vertex_id)
    blocks = [sorted(classes[color]) for color in sorted(classes)]

    best_code, best_order, hits = None, (), 0
    for choice in itertools.product(*(itertools.permutations(block) for block in blocks)):
        order = tuple(vertex_id for block in choice for vertex_id in block)
        position = {vertex_id: i for i, vertex_id in enumerate(order)}
        code = (
            tuple(labels[vertex_id] for vertex_id in order),
            tuple(sorted((position[e.tail], position[e.head], _w(e.weight)) for e in d.edges)),
            tuple(sorted((position[e.source], _w(e.weight)) for e in d.ends)),
        )
        if best_code is None or code < best_code:
            best_code, best_order, hits = code, order, 1
        elif code == best_code:
            hits += 1
    return best_code, best_order, hits


def canonical_form(d: FloorDiagram) -> tuple:
    """Code equal for isomorphic diagrams and different otherwise"""
    return d.canonical[0]


def aut_order(d: FloorDiagram) -> int:
    """|Aut D|: vertex automorphisms times permutations of parallel edges and of equal ends"""
    vertex_automorphisms = d.canonical[2]
    parallel = Counter((e.tail, e.head, _w(e.weight)) for e in d.edges)
    stacked_ends = Counter((e.source, _w(e.weight)) for e in d.ends)
    return (
        vertex_automorphisms
        * math.prod(math.factorial(c) for c in parallel.values())
        * math.prod(math.factorial(c) for c in stacked_ends.values())
    )


def canonical_diagram(d: FloorDiagram) -> FloorDiagram:
    """Isomorphic copy with ids 0.. assigned in canonical order"""
    _, order, _ = d.canonical
    position = {vertex_id: i for i, vertex_id in enumerate(order)}
    vertices = tuple(replace(d.vertex_map[vertex_id], id=position[vertex_id]) for vertex_id in order)
    edges = sorted((position[e.tail], position[e.head], e.weight) for e in d.edges)
    ends = sorted((position[e.source], e.weight) for e in d.ends)
    return FloorDiagram(
        vertices,
        tuple(Edge(i, tail, head, weight) for i, (tail, head, weight) in enumerate(edges)),
        tuple(End(i, source, weight) for i, (source, weight) in enumerate(ends)),
    )


def flow_balance(d: FloorDiagram) -> Tuple[int, int]:
    """(total end weight, ground outflow + 2·joint weights); equal for valid diagrams"""
    ground = sum(d.outflow(g.id) for g in d.ground_floors)
    joints = sum(d.outflow(j.id) for j in d.joints)
    return sum(e.weight for e in d.ends), ground + joints


def diagram_to_json(d: FloorDiagram, surface: Optional[SurfaceKind] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {}
    if surface is not None:
        payload["surface"] = str(surface)
    vertices = []
    for v in d.vertices:
        entry: Dict[str, Any] = {"id": v.id, "kind": v.kind.value}
        if v.degree is not None:
            entry["degree"] = str(v.degree)
        vertices.append(entry)
    payload["vertices"] = vertices
    payload["edges"] = [_with_weight({"tail": e.tail, "head": e.head}, e.weight) for e in d.edges]
    payload["ends"] = [_with_weight({"source": e.source}, e.weight) for e in d.ends]
    return payload


def _with_weight(entry: Dict[str, Any], weight: Optional[int]) -> Dict[str, Any]:
    if weight is not None:
        entry["weight"] = weight
    return entry


def diagram_from_json(payload: Mapping[str, Any]) -> Tuple[FloorDiagram, Optional[SurfaceKind]]:
    """
    Build a diagram from its JSON description.

    Vertex ids may be integers or strings; references to unknown ids are kept
    so that validate() reports them as structural errors.
    """
    try:
        raw_vertices = list(payload["vertices"])
    except (KeyError, TypeError) as e:
        raise DiagramStructureError("diagram JSON needs a 'vertices' list") from e

    raw_ids = [item.get("id") for item in raw_vertices]
    if all(isinstance(i, int) and not isinstance(i, bool) for i in raw_ids):
        index: Dict[Any, int] = {i: i for i in raw_ids}
    else:
        index = {}
        for i in raw_ids:
            index.setdefault(i, len(index))

    def vertex_ref(ref: Any) -> int:
        if ref not in index:
            index[ref] = (max(index.values()) + 1) if index else 0
        return index[ref]

    try:
        vertices = []
        for item in raw_vertices:
            kind = VertexKind(item["kind"])
            degree = item.get("degree")
            vertices.append(Vertex(vertex_ref(item["id"]), kind, HalfInt.parse(degree) if degree is not None else None))
        edges = tuple(
            Edge(i, vertex_ref(item["tail"]), vertex_ref(item["head"]), _weight(item.get("weight")))
            for i, item in enumerate(payload.get("edges", []))
        )
        ends = tuple(
            End(i, vertex_ref(item["source"]), _weight(item.get("weight")))
            for i, item in enumerate(payload.get("ends", []))
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DiagramStructureError(f"malformed diagram JSON: {e}") from e

    surface = SurfaceKind.parse(payload["surface"]) if payload.get("surface") is not None else None
    return FloorDiagram(tuple(vertices), edges, ends), surface


def _weight(value: Any) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"weights must be integers, got {value!r}")
    return value
