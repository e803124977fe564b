#!/usr/bin/env python
"""
Regularity Test Script

Checks the extended graph, weighting counts, minor analysis, quasi-polynomial
fits along rays and the weighting path to the invariants.
"""
import sys
from fractions import Fraction

import pytest

from tmoebius.catalog import build, parity_example_shapes
from tmoebius.core import HalfInt, Partition
from tmoebius.diagram import HomologyClass, SurfaceKind
from tmoebius.enumeration import enumerate_shapes
from tmoebius.errors import ChamberCrossingError, RegularityFitError
from tmoebius.multiplicity import InvariantRequest, invariant_N
from tmoebius.regularity import (
    RelativeCount, SampleFamily, build_extended, count_weightings, fit_regularity, fixed_label_symmetry,
    invariant_via_weightings, is_totally_unimodular, iter_weight_vectors, minor_analysis,
)

M0, M1 = SurfaceKind.M0, SurfaceKind.M1


@pytest.fixture
def joint_shape():
    return build([("J", None), ("E", "1")], [(0, 1, None)], [(0, None), (1, None)])


@pytest.fixture
def ground_shape():
    return build([("G", "1/2"), ("E", "1")], [(0, 1, None)], [(1, None)])


class TestExtendedGraph:
    def test_joint_rows(self, joint_shape):
        eg = build_extended(joint_shape, M0)
        assert eg.rows == (("vertex", 0), ("vertex", 1), ("end", 0), ("end", 1))
        assert eg.columns == (("edge", 0), ("end", 0), ("end", 1))
        assert eg.matrix == ((1, -1, 0), (1, 0, -1), (0, 1, 0), (0, 0, 1))
        assert eg.divergence({0: 3, 1: 3}) == (0, 0, 3, 3)
        assert is_totally_unimodular(eg)

    def test_ground_rows(self, ground_shape):
        eg = build_extended(ground_shape, M1)
        assert eg.columns == (("edge", 0), ("end", 0), ("ground", 0))
        assert eg.matrix[0] == (-1, 0, 2)
        assert eg.divergence({0: 5}) == (-1, 0, 5)
        assert not is_totally_unimodular(eg)
        assert eg.endpoints(("ground", 0)) == (("vertex", 0),)

    def test_needs_degrees(self):
        shape = build([("G", None)], [], [(0, None)])
        with pytest.raises(ValueError):
            build_extended(shape, M0)


class TestWeightings:
    def test_joint_forces_equal_values(self, joint_shape):
        eg = build_extended(joint_shape, M0)
        assert list(iter_weight_vectors(eg, {0: 3, 1: 3})) == [(3, 3, 3)]
        assert count_weightings(eg, {0: 2, 1: 3}) == 0

    def test_ground_parity(self, ground_shape):
        eg = build_extended(ground_shape, M1)
        assert list(iter_weight_vectors(eg, {0: 5})) == [(5, 5, 2)]
        assert count_weightings(eg, {0: 4}) == 0
        assert count_weightings(eg, {0: 5}, {("edge", 0): 2, ("ground", 0): 1}) == 50

    @pytest.mark.parametrize("x, y", [(1, 3), (1, 5), (2, 4), (3, 3), (3, 4), (4, 2), (2, 7)])
    def test_parity_shape_c(self, x, y):
        eg = build_extended(parity_example_shapes()["c"], M0)
        expected = 1 if y > x and (y - x) % 2 == 0 else 0
        assert count_weightings(eg, {0: x, 1: y}) == expected


class TestMinors:
    def test_ground_tree(self, ground_shape):
        reports = minor_analysis(build_extended(ground_shape, M1))
        assert len(reports) == 1
        report = reports[0]
        assert abs(report.determinant) == 2
        assert [c.kind for c in report.components] == ["ground_tree"]
        assert report.cokernel == (2,)
        assert report.consistent
        assert report.to_json()["consistent"] is True

    def test_nonsquare_has_no_maximal_minor(self, joint_shape):
        assert minor_analysis(build_extended(joint_shape, M0)) == []

    @pytest.mark.parametrize("name", ["a", "b", "c"])
    def test_parity_shapes_are_consistent(self, name):
        reports = minor_analysis(build_extended(parity_example_shapes()[name], M0))
        assert all(r.consistent for r in reports)
        for r in reports:
            if r.determinant:
                assert all(abs(c.determinant) == 2 for c in r.components)
                assert abs(r.determinant) == 2 ** len(r.components)

    def test_column_bound(self):
        eg = build_extended(parity_example_shapes()["a"], M0)
        with pytest.raises(ValueError):
            minor_analysis(eg, max_columns=3)


class TestFits:
    def test_parity_example_needs_two_classes(self):
        relative = RelativeCount((parity_example_shapes()["a"],), M0, 2)
        family = SampleFamily((5, 7), (1, 1))
        fit = fit_regularity(relative, family)
        assert not fit.is_polynomial
        assert len(fit.residue_classes) == 2
        for t in range(fit.samples, fit.samples + 100):
            assert fit.evaluate(t) == relative.value(family.point(t))
        payload = fit.to_json()
        assert payload["residual"] == 0
        assert payload["single_polynomial"] is None
        assert payload["chamber_ray"] == {"base": [5, 7], "direction": [1, 1]}

    def test_in_chamber_ray_is_polynomial(self):
        relative = RelativeCount(enumerate_shapes(M0, 1, HalfInt(2), 2), M0, 0)
        family = SampleFamily((3, 5), (1, 1))
        fit = fit_regularity(relative, family)
        assert fit.is_polynomial
        for t in range(fit.samples, fit.samples + 100):
            assert fit.evaluate(t) == relative.value(family.point(t))

    @pytest.mark.parametrize("a, fixed_count, base", [
        (HalfInt(2), 0, (3, 5)),
        (HalfInt(2), 1, (3, 5)),
        (HalfInt(3), 1, (4, 6)),
    ])
    def test_genus_two_rays_are_polynomial(self, a, fixed_count, base):
        relative = RelativeCount(enumerate_shapes(M0, 2, a, 2), M0, fixed_count)
        family = SampleFamily(base, (1, 1))
        fit = fit_regularity(relative, family)
        assert fit.is_polynomial
        for t in range(fit.samples, fit.samples + 100):
            assert fit.evaluate(t) == relative.value(family.point(t))

    def test_wall_crossing(self):
        relative = RelativeCount((parity_example_shapes()["c"],), M0, 0)
        with pytest.raises(ChamberCrossingError, match="t=0 and t=4"):
            fit_regularity(relative, SampleFamily((1, 5), (1, 0)))

    def test_degree_bound_too_small(self):
        relative = RelativeCount(enumerate_shapes(M0, 1, HalfInt(2), 2), M0, 0)
        with pytest.raises(RegularityFitError):
            fit_regularity(relative, SampleFamily((3, 5), (1, 1)), degree_bound=0)

    def test_entries_stay_positive(self):
        relative = RelativeCount(enumerate_shapes(M0, 1, HalfInt(2), 2), M0, 0)
        with pytest.raises(ValueError):
            fit_regularity(relative, SampleFamily((0, 1), (1, 1)))
        with pytest.raises(ValueError):
            SampleFamily((1, 2), (1,))

    def test_shapes_share_end_count(self, joint_shape):
        shapes = (joint_shape, build([("G", "1")], [], [(0, None)]))
        with pytest.raises(ValueError):
            RelativeCount(shapes, M0, 0).value((2, 2))


class TestWeightingPath:
    @pytest.mark.parametrize("surface, g, a, b, fixed, free", [
        (M0, 1, "1", "1", (), (1, 1)),
        (M0, 1, "1", "1", (1, 1), ()),
        (M0, 1, "1", "1", (1,), (1,)),
        (M0, 2, "1", "1", (1, 1), ()),
        (M1, 1, "1/2", "1/2", (), (1,)),
        (M1, 1, "3/2", "3/2", (1,), (2,)),
        (M1, 2, "1", "1", (1,), (1,)),
    ])
    def test_agrees_with_diagram_path(self, surface, g, a, b, fixed, free):
        req = InvariantRequest(surface, g, HomologyClass.parse(a, b), Partition(fixed), Partition(free))
        assert Fraction(invariant_via_weightings(req)) == Fraction(invariant_N(req))

    def test_parity_violation(self):
        req = InvariantRequest(M0, 1, HomologyClass.parse("1", "1/2"), Partition(), Partition((1,)))
        assert invariant_via_weightings(req) == 0

    def test_label_symmetry(self):
        assert fixed_label_symmetry(Partition((1,)), Partition((1,))) == 1
        assert fixed_label_symmetry(Partition((1, 1)), Partition((2, 1, 1))) == 4


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
