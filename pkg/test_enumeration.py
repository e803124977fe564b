#!/usr/bin/env python
"""
Enumeration Test Script

Checks diagram enumeration against a naive generate-and-filter search, and
the marking machinery: order relation, complement components, patterns and
labelings.
"""
import itertools
import sys

import networkx as nx
import pytest

from tmoebius.catalog import build, example_table, genus2_catalogue, genus2_family, genus2_instances
from tmoebius.core import HalfInt, Partition
from tmoebius.diagram import (
    Edge, End, FloorDiagram, HomologyClass, SurfaceKind, Vertex, VertexKind, canonical_form, genus,
    homology_class, tangency_profile, validate,
)
from tmoebius.enumeration import (
    Cell, ComponentTag, check_request, classify_components, count_linear_extensions, cycle_vertices,
    enumerate_diagrams, enumerate_marking_patterns, enumerate_markings, enumerate_shapes, enumerate_weighted_shapes,
    fixed_end_assignments, iter_diagrams, iter_edge_weightings, iter_linear_extensions, marking_size, order_relation,
)
from tmoebius.errors import InvalidRequestError

M0, M1 = SurfaceKind.M0, SurfaceKind.M1
KINDS = (VertexKind.GROUND, VertexKind.ETAGE, VertexKind.JOINT)


def naive_diagrams(surface: SurfaceKind, g: int, cls: HomologyClass, profile: Partition) -> set:
    """Canonical codes of every valid diagram found by trying all small graphs"""
    doubled_a, norm = cls.a.doubled, profile.norm()
    codes = set()
    # floors ≤ g, and every joint sends 2w ≥ 2 towards the ends
    for n_vertices in range(1, g + norm // 2 + 1):
        for kinds in itertools.combinations_with_replacement(KINDS, n_vertices):
            floors = [i for i, k in enumerate(kinds) if k is not VertexKind.JOINT]
            n_edges = g - 1 - len(floors) + n_vertices
            if not 1 <= len(floors) <= g or n_edges < 0:
                continue
            pairs = [(t, h) for t in range(n_vertices) for h in range(n_vertices) if t != h]
            for degrees in itertools.product(range(1, doubled_a + 1), repeat=len(floors)):
                if sum(degrees) != doubled_a:
                    continue
                degree_of = dict(zip(floors, degrees))
                vertices = tuple(
                    Vertex(i, k, HalfInt(degree_of[i]) if i in degree_of else None) for i, k in enumerate(kinds)
                )
                for chosen in itertools.combinations_with_replacement(pairs, n_edges):
                    for weights in itertools.product(range(1, norm + 1), repeat=n_edges):
                        edges = tuple(Edge(i, t, h, w) for i, ((t, h), w) in enumerate(zip(chosen, weights)))
                        for sources in itertools.product(range(n_vertices), repeat=profile.length()):
                            ends = tuple(End(i, s, w) for i, (s, w) in enumerate(zip(sources, profile.parts)))
                            d = FloorDiagram(vertices, edges, ends)
                            if not validate(d, surface) and genus(d) == g and homology_class(d) == cls:
                                codes.add(canonical_form(d))
    return codes


class TestEnumerateDiagrams:
    @pytest.mark.parametrize("surface, g, a, b, parts", [
        (M0, 1, "1", "1", (1, 1)),
        (M1, 1, "1/2", "1/2", (1,)),
        (M1, 1, "1", "1", (1, 1)),
        (M0, 1, "3/2", "1", (2,)),
        (M0, 2, "1", "1", (1, 1)),
        (M1, 2, "1/2", "1/2", (1,)),
    ])
    def test_agrees_with_naive_search(self, surface, g, a, b, parts):
        cls, profile = HomologyClass.parse(a, b), Partition(parts)
        found = enumerate_diagrams(surface, g, cls, profile)
        assert {canonical_form(d) for d in found} == naive_diagrams(surface, g, cls, profile)
        assert len({canonical_form(d) for d in found}) == len(found)
        for d in found:
            assert validate(d, surface) == []
            assert genus(d) == g
            assert homology_class(d) == cls
            assert tangency_profile(d) == profile

    def test_genus_one_example(self):
        found = enumerate_diagrams(M0, 1, HomologyClass.parse("1", "1"), Partition((1, 1)))
        assert sorted(len(d.vertices) for d in found) == [1, 2]

    @pytest.mark.parametrize("entry", example_table(), ids=lambda e: e.name)
    def test_catalogue_is_enumerated(self, entry):
        found = enumerate_diagrams(entry.surface, entry.genus, entry.homology, entry.profile)
        assert canonical_form(entry.diagram) in {canonical_form(d) for d in found}

    def test_output_is_deterministic(self):
        args = (M1, 2, HomologyClass.parse("3/2", "3/2"), Partition((2, 1)))
        first = enumerate_diagrams(*args)
        assert first == enumerate_diagrams(*args)
        assert first == enumerate_diagrams(*args, jobs=2)
        assert [canonical_form(d) for d in first] == sorted(canonical_form(d) for d in first)

    def test_diagrams_stream(self):
        args = (M1, 2, HomologyClass.parse("3/2", "3/2"), Partition((1, 1, 1)))
        stream = iter_diagrams(*args, jobs=1)
        first = next(stream)
        rest = list(stream)
        codes = [canonical_form(d) for d in [first] + rest]
        assert len(set(codes)) == len(codes)
        assert sorted(codes) == [canonical_form(d) for d in enumerate_diagrams(*args)]
        assert [canonical_form(d) for d in iter_diagrams(*args, jobs=2)] == codes

    def test_stream_checks_the_request_first(self):
        stream = iter_diagrams(M0, 1, HomologyClass.parse("1", "1/2"), Partition((1,)))
        with pytest.raises(InvalidRequestError, match="mod 2"):
            next(stream)

    def test_rejects_inconsistent_requests(self):
        with pytest.raises(InvalidRequestError, match="differs from 2b"):
            enumerate_diagrams(M0, 1, HomologyClass.parse("1", "1"), Partition((1, 2)))
        with pytest.raises(InvalidRequestError, match="mod 2"):
            enumerate_diagrams(M0, 1, HomologyClass.parse("1", "1/2"), Partition((1,)))
        assert len(check_request(M0, 0, HomologyClass.parse("0", "1"), Partition((2,)))) == 2


class TestShapes:
    def test_genus_two_families(self):
        shapes = {canonical_form(s) for s in enumerate_weighted_shapes(M0, 2, Partition((1, 1)))}
        for instance in genus2_instances().values():
            assert canonical_form(instance.without_degrees()) in shapes

    @pytest.mark.parametrize("surface", [M0, M1])
    @pytest.mark.parametrize("n_ends", [1, 2, 3, 4])
    def test_genus_two_catalogue(self, surface, n_ends):
        catalogue = genus2_catalogue(surface, n_ends)
        found = enumerate_weighted_shapes(surface, 2, Partition((1,) * n_ends))
        assert {canonical_form(s) for s in catalogue} == {canonical_form(s) for s in found}
        assert {genus2_family(s) for s in catalogue} <= {"a", "b", "c"}

    def test_genus_two_catalogue_sizes(self):
        # J⇒E, J→E1 E2, E1→E2, G→E with weight 2, G→E with a ground end
        assert len(genus2_catalogue(M0, 2)) == 5
        # only G→E with weight 1 has one end, and its ground outflow is odd
        assert genus2_catalogue(M0, 1) == ()
        assert len(genus2_catalogue(M1, 1)) == 1

    def test_weight_free_shapes_carry_degrees(self):
        shapes = enumerate_shapes(M0, 1, HalfInt(2), 2)
        assert shapes
        for shape in shapes:
            assert all(v.degree is not None for v in shape.floors)
            assert sum(v.degree.doubled for v in shape.floors) == 2
            assert all(e.weight is None for e in shape.edges)

    def test_edge_weightings_respect_joints(self):
        shape = build([("J", None), ("E", "1")], [(0, 1, None), (0, 1, None)], [(1, None), (1, None)])
        assert list(iter_edge_weightings(shape, {0: 1, 1: 1})) == [{0: 1, 1: 1}]
        assert list(iter_edge_weightings(shape, {0: 2, 1: 2})) == [{0: 2, 1: 2}]
        split = build([("J", None), ("E", "1"), ("E", "1")], [(0, 1, None), (0, 2, None)], [(1, None), (2, None)])
        assert list(iter_edge_weightings(split, {0: 1, 1: 2})) == []


class TestMarkings:
    def test_ground_floor_with_two_ends(self):
        d = build([("G", "1/2")], [], [(0, 1), (0, 1)])
        markings = enumerate_markings(d, Partition(), Partition((1, 1)))
        assert len(markings) == 2
        assert {m.placements for m in markings} == {
            (Cell("end", 0), Cell("end", 1)),
            (Cell("end", 1), Cell("end", 0)),
        }

    def test_fixed_ends_on_joint_cycle(self):
        d = {e.name: e.diagram for e in example_table()}["4a'"]
        markings = enumerate_markings(d, Partition((1, 1)), Partition())
        assert len(markings) == 2
        for m in markings:
            assert m.placements[0] == Cell("etage", 1)
            assert m.fixed_ends == frozenset({0, 1})
            assert m.label_of(Cell("etage", 1)) == 1
            assert m.label_of(Cell("edge", 0)) is None
        report = classify_components(d, markings[0].cells)
        assert [c.tag for c in report.components] == [ComponentTag.ODD_JOINT_CYCLE]
        assert report.odd_cycles == 1

    @pytest.mark.parametrize("pairs, cycle", [
        ([(0, 1), (0, 1), (1, 2)], [0, 1]),
        ([(0, 1), (1, 2), (2, 0), (2, 3)], [0, 1, 2]),
    ])
    def test_cycle_vertices(self, pairs, cycle):
        graph = nx.MultiGraph(pairs)
        assert sorted(cycle_vertices(graph)) == cycle

    def test_ground_floor_on_a_cycle_is_invalid(self):
        d = {e.name: e.diagram for e in example_table()}["4a"]
        report = classify_components(d, [Cell("etage", 1), Cell("end", 0), Cell("end", 1)])
        assert not report.valid
        assert report.components[0].tag is ComponentTag.INVALID

    def test_even_joint_cycle_leaves_no_markings(self):
        d = build(
            [("J", None), ("J", None), ("E", "1"), ("E", "1")],
            [(0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)],
            [(2, 2), (3, 2)],
        )
        assert validate(d, M0) == []
        assert enumerate_markings(d, Partition((2, 2)), Partition()) == []
        report = classify_components(d, [Cell("etage", 2), Cell("etage", 3), Cell("end", 0), Cell("end", 1)])
        assert "2 joints" in report.components[0].reason

    def test_marking_size(self):
        for entry in example_table():
            assert marking_size(entry.diagram) == len(entry.diagram.ends) + entry.genus - 1

    def test_every_pattern_is_valid(self):
        d = {e.name: e.diagram for e in example_table()}["4b"]
        for pattern in enumerate_marking_patterns(d, Partition((1,)), Partition((2, 1))):
            assert len(pattern.cells) == marking_size(d)
            assert classify_components(d, pattern.cells).valid
            assert Cell("etage", 1) in pattern.cells
            assert len(pattern.fixed_ends) == 1

    def test_fixed_end_assignments(self):
        d = {e.name: e.diagram for e in example_table()}["4b"]
        assert len(fixed_end_assignments(d, Partition((1,)))) == 2
        assert len(fixed_end_assignments(d, Partition((2, 1)))) == 2
        assert fixed_end_assignments(d, Partition((3,))) == []

    def test_profile_mismatch(self):
        d = build([("G", "1/2")], [], [(0, 1), (0, 1)])
        with pytest.raises(ValueError):
            enumerate_marking_patterns(d, Partition((2,)), Partition())


class TestOrderRelation:
    def test_edges_sit_between_their_endpoints(self):
        d = {e.name: e.diagram for e in example_table()}["4c"]
        above = order_relation(d)
        assert Cell("etage", 1) in above[Cell("edge", 0)]
        assert Cell("etage", 2) in above[Cell("etage", 1)]
        assert Cell("end", 0) not in above[Cell("etage", 1)]

    def test_extension_count_matches_listing(self):
        d = {e.name: e.diagram for e in example_table()}["4b"]
        above = order_relation(d)
        cells = sorted(above)
        assert count_linear_extensions(cells, above) == len(list(iter_linear_extensions(cells, above)))

    def test_chain(self):
        d = build([("G", "1"), ("E", "1")], [(0, 1, 2)], [(1, 2)])
        above = order_relation(d)
        cells = [Cell("edge", 0), Cell("etage", 1), Cell("end", 0)]
        assert count_linear_extensions(cells, above) == 1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
