"""
Catalogue

Reference diagrams: the worked example table (six diagrams on TM0 and TM1),
the three shapes of the parity example in genus 3 and 4, and the genus-2
shape families together with a generator for every genus-2 shape whose ends
all have weight 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .core import HalfInt, Partition
from .diagram import Edge, End, FloorDiagram, HomologyClass, SurfaceKind, Vertex, VertexKind, canonical_form, genus

_KINDS = {"G": VertexKind.GROUND, "E": VertexKind.ETAGE, "J": VertexKind.JOINT}


def build(
    vertices: Sequence[Tuple[str, Optional[str]]],
    edges: Sequence[Tuple[int, int, Optional[int]]] = (),
    ends: Sequence[Tuple[int, Optional[int]]] = (),
) -> FloorDiagram:
    """
    Compact constructor: vertices as (kind letter "G", "E" or "J", degree),
    edges as (tail, head, weight), ends as (source, weight); ids are positions.
    """
    return FloorDiagram(
        tuple(
            Vertex(i, _KINDS[kind], HalfInt.parse(degree) if degree is not None else None)
            for i, (kind, degree) in enumerate(vertices)
        ),
        tuple(Edge(i, tail, head, weight) for i, (tail, head, weight) in enumerate(edges)),
        tuple(End(i, source, weight) for i, (source, weight) in enumerate(ends)),
    )


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    surface: SurfaceKind
    diagram: FloorDiagram
    genus: int
    homology: HomologyClass
    profile: Partition


def _entry(name: str, surface: SurfaceKind, diagram: FloorDiagram, g: int, a: str, b: str, profile: Sequence[int]) -> CatalogEntry:
    return CatalogEntry(name, surface, diagram, g, HomologyClass.parse(a, b), Partition(tuple(profile)))


def example_table() -> List[CatalogEntry]:
    """The six diagrams of the worked example table with their stated genus, class and tangency"""
    m0, m1 = SurfaceKind.M0, SurfaceKind.M1
    return [
        _entry("4a", m0, build(
            [("G", "1/2"), ("E", "1")],
            [(0, 1, 1), (0, 1, 1)],
            [(1, 1), (1, 1)],
        ), 3, "3/2", "1", (1, 1)),
        _entry("4a'", m0, build(
            [("J", None), ("E", "1")],
            [(0, 1, 1), (0, 1, 1)],
            [(1, 1), (1, 1)],
        ), 2, "1", "1", (1, 1)),
        _entry("4b", m0, build(
            [("G", "1/2"), ("E", "1"), ("J", None)],
            [(0, 1, 1), (0, 1, 1), (2, 1, 1), (2, 1, 1)],
            [(1, 1), (1, 1), (1, 2)],
        ), 4, "3/2", "2", (2, 1, 1)),
        _entry("4c", m0, build(
            [("G", "1/2"), ("E", "2"), ("E", "1"), ("J", None)],
            [(0, 1, 1), (3, 1, 1), (3, 2, 1), (1, 2, 2)],
            [(0, 1), (2, 1), (2, 2)],
        ), 4, "7/2", "2", (2, 1, 1)),
        _entry("4b'", m1, build(
            [("G", "1/2"), ("G", "1/2"), ("E", "1"), ("J", None)],
            [(0, 2, 1), (1, 2, 1), (3, 2, 1), (3, 2, 1)],
            [(2, 3), (2, 1)],
        ), 4, "2", "2", (3, 1)),
        _entry("4c'", m1, build(
            [("G", "1/2"), ("E", "2"), ("E", "1"), ("J", None)],
            [(0, 1, 1), (3, 1, 1), (3, 2, 1), (1, 2, 2)],
            [(2, 2), (2, 1)],
        ), 4, "7/2", "3/2", (2, 1)),
    ]


def parity_example_shapes() -> Dict[str, FloorDiagram]:
    """
    Weight-free shapes of the mod-2 example, each with two ends.

    "a": two ground floors feeding two étages joined by an interior edge;
    "b": a joint doubling into the lower étage; "c": a joint feeding both.
    """
    return {
        "a": build(
            [("G", "1/2"), ("G", "1/2"), ("E", "1"), ("E", "1")],
            [(0, 2, None), (1, 3, None), (2, 3, None)],
            [(2, None), (3, None)],
        ),
        "b": build(
            [("J", None), ("G", "1/2"), ("E", "1"), ("E", "1")],
            [(0, 2, None), (0, 2, None), (1, 3, None), (2, 3, None)],
            [(2, None), (3, None)],
        ),
        "c": build(
            [("J", None), ("E", "1"), ("E", "1")],
            [(0, 1, None), (0, 2, None), (1, 2, None)],
            [(1, None), (2, None)],
        ),
    }


def genus2_family(shape: FloorDiagram) -> str:
    """
    Family of a genus-2 shape: "a" one étage closing a cycle through joints,
    "b" two étages, "c" a ground floor below an étage.

    Raises:
        ValueError: for shapes of another genus or outside the three families
    """
    g = genus(shape)
    if g != 2:
        raise ValueError(f"expected a genus-2 shape, got genus {g}")
    grounds, etages = len(shape.ground_floors), len(shape.etages)
    if grounds == 0 and etages == 1:
        return "a"
    if grounds == 0 and etages == 2:
        return "b"
    if grounds == 1 and etages == 1:
        return "c"
    raise ValueError(f"genus-2 shape with {grounds} ground floors and {etages} étages fits no family")


def genus2_instances() -> Dict[str, FloorDiagram]:
    """One weighted instance per genus-2 family, profile 1^2 on TM0"""
    return {
        "a": build([("J", None), ("E", "1")], [(0, 1, 1), (0, 1, 1)], [(1, 1), (1, 1)]),
        "b": build([("J", None), ("E", "1"), ("E", "1")], [(0, 1, 1), (0, 2, 1)], [(1, 1), (2, 1)]),
        "c": build([("G", "1/2"), ("E", "1")], [(0, 1, 2)], [(1, 1), (1, 1)]),
    }


def _with_pendant_joints(
    vertices: List[Tuple[str, Optional[str]]],
    edges: List[Tuple[int, int, Optional[int]]],
    ends: List[Tuple[int, Optional[int]]],
    targets: Sequence[int],
) -> FloorDiagram:
    """Attach one joint per target étage, with a weight-1 edge into it and a weight-1 end"""
    vertices, edges, ends = list(vertices), list(edges), list(ends)
    for target in targets:
        joint = len(vertices)
        vertices.append(("J", None))
        edges.append((joint, target, 1))
        ends.append((joint, 1))
    return build(vertices, edges, ends)


def genus2_catalogue(surface: SurfaceKind, n_ends: int) -> Tuple[FloorDiagram, ...]:
    """
    Every degree-free weighted genus-2 shape with n_ends ends of weight 1,
    generated family by family and sorted by canonical form.

    Each family has a core that carries the genus, and k pendant joints that
    feed a weight-1 edge into an étage and emit one end:

    - "a": a joint sending both its edges, weight w, into a single étage
    - "b": a joint feeding two étages with weight w each, or an étage
      feeding a second étage with weight u
    - "c": a ground floor feeding an étage with weight u; on TM0 its outflow is even
    """
    shapes: List[FloorDiagram] = []
    if n_ends % 2 == 0:
        half = n_ends // 2
        for w in range(1, half + 1):
            k = half - w
            shapes.append(_with_pendant_joints(
                [("J", None), ("E", None)], [(0, 1, w), (0, 1, w)], [(1, 1)] * (2 * w + k), [1] * k,
            ))
            for k1 in range(k + 1):
                k2 = k - k1
                shapes.append(_with_pendant_joints(
                    [("J", None), ("E", None), ("E", None)],
                    [(0, 1, w), (0, 2, w)],
                    [(1, 1)] * (w + k1) + [(2, 1)] * (w + k2),
                    [1] * k1 + [2] * k2,
                ))
        for k1 in range(1, half + 1):
            k2 = half - k1
            for u in range(1, k1 + 1):
                shapes.append(_with_pendant_joints(
                    [("E", None), ("E", None)], [(0, 1, u)], [(0, 1)] * (k1 - u) + [(1, 1)] * (u + k2),
                    [0] * k1 + [1] * k2,
                ))
    for k in range((n_ends - 1) // 2 + 1):
        for u in range(1, n_ends - 2 * k + 1):
            ground_ends = n_ends - 2 * k - u
            if surface is SurfaceKind.M0 and (u + ground_ends) % 2:
                continue
            shapes.append(_with_pendant_joints(
                [("G", None), ("E", None)], [(0, 1, u)], [(0, 1)] * ground_ends + [(1, 1)] * (u + k), [1] * k,
            ))
    unique = {canonical_form(s): s for s in shapes}
    return tuple(unique[code] for code in sorted(unique))
