#!/usr/bin/env python
"""
Generating Series Test Script

Checks the generating series, the per-shape rearrangement, the product
factorizations and the span certificates.
"""
import sys
from fractions import Fraction

import pytest

from tmoebius.catalog import build
from tmoebius.core import HalfInt, Partition, TruncatedSeries, eisenstein_G2, series_H, series_H1, sigma1, sigma1_tilde
from tmoebius.diagram import SurfaceKind
from tmoebius.enumeration import enumerate_weighted_shapes
from tmoebius.errors import InvalidRequestError
from tmoebius.series import (
    SeriesFactor, SeriesRequest, assembled_span_check, factorized_form, generating_series, per_diagram_series,
    quasimodular_span_check, series_from_shapes,
)

M0, M1 = SurfaceKind.M0, SurfaceKind.M1


def series_request(surface, g, b, fixed=(), free=(), order=8) -> SeriesRequest:
    return SeriesRequest(surface, g, HalfInt.parse(b), Partition(fixed), Partition(free), order)


class TestGeneratingSeries:
    def test_genus_one_coefficients(self):
        series = generating_series(series_request(M0, 1, "1", free=(1, 1), order=4))
        assert series.coefficients == (0, 2, 12, 24, 56)

    def test_only_admissible_degrees(self):
        req = series_request(M1, 1, "1/2", free=(1,), order=7)
        assert req.admissible_degrees() == [1, 3, 5, 7]
        series = generating_series(req)
        assert all(series.coefficient(n) == 0 for n in (0, 2, 4, 6))
        assert all(series.coefficient(n) == 2 * sigma1_tilde(n) for n in (1, 3, 5, 7))

    @pytest.mark.parametrize("req", [
        series_request(M0, 1, "1", free=(1, 1)),
        series_request(M1, 1, "1", fixed=(1,), free=(1,)),
        series_request(M1, 2, "1", fixed=(1,), free=(1,), order=6),
        series_request(M0, 2, "1", free=(1, 1), order=6),
    ])
    def test_rearrangement_by_shapes(self, req):
        assert series_from_shapes(req).agrees_with(generating_series(req))

    def test_request_validation(self):
        with pytest.raises(InvalidRequestError, match="not an integer"):
            generating_series(series_request(M0, 1, "1/2", free=(1,)))
        with pytest.raises(InvalidRequestError, match="differs from 2b"):
            generating_series(series_request(M1, 1, "1", free=(1,)))
        assert series_request(M0, 0, "1", free=(2,), order=-1).problems() != []


class TestFactorization:
    def test_genus_one_shapes(self):
        forms = {
            str(factorized_form(s, M0, Partition(), Partition((1, 1))))
            for s in enumerate_weighted_shapes(M0, 1, Partition((1, 1)))
        }
        assert forms == {"2 (D^1 H)", "4 (D^1 G2(y^2))"}

    def test_odd_ground_floor_on_m1(self):
        shape = build([("G", None)], [], [(0, 1)])
        form = factorized_form(shape, M1, Partition(), Partition((1,)))
        assert form.factors == (SeriesFactor("H1", 0),)
        assert form.weight == 2
        assert form.expand(9).agrees_with(series_H1(9) * 2)

    def test_odd_ground_floor_on_m0_vanishes(self):
        shape = build([("G", None)], [], [(0, 1)])
        assert factorized_form(shape, M0, Partition(), Partition((1,))).is_zero()
        assert per_diagram_series(shape, M0, Partition(), Partition((1,)), 6) == TruncatedSeries.zero(6)

    @pytest.mark.parametrize("surface, g, parts", [
        (M0, 1, (1, 1)),
        (M1, 1, (1,)),
        (M1, 1, (2, 1)),
        (M0, 2, (1, 1)),
        (M1, 2, (2,)),
    ])
    def test_expansion_matches_direct_sum(self, surface, g, parts):
        free = Partition(parts)
        for shape in enumerate_weighted_shapes(surface, g, free):
            direct = per_diagram_series(shape, surface, Partition(), free, 12)
            assert factorized_form(shape, surface, Partition(), free).expand(12).agrees_with(direct)

    def test_factor_expansion(self):
        etage = SeriesFactor("G2(y^2)", 1).expand(8)
        assert etage.coefficients[2::2] == tuple(Fraction(a * sigma1(a)) for a in range(1, 5))
        assert not any(etage.coefficients[1::2])
        assert SeriesFactor("H", 2).expand(5).agrees_with(series_H(5).derive(2))
        assert SeriesFactor("H0", 3).leading() == (2, Fraction(16))
        assert str(SeriesFactor("H", 0)) == "(H)"

    def test_to_json(self):
        shape = build([("G", None)], [], [(0, 1), (0, 1)])
        payload = factorized_form(shape, M0, Partition(), Partition((1, 1))).to_json()
        assert payload == {"W": "2", "factors": ["(D^1 H)"]}


class TestSpanCheck:
    def test_finds_combination(self):
        g2, h = eisenstein_G2(12), series_H(12)
        target = g2 * g2 - h * 3
        certificate = quasimodular_span_check(target, [g2, h], 12, monomials=[(0, 0), (1,)])
        assert certificate.ok
        assert certificate.combination == (Fraction(1), Fraction(-3))
        assert certificate.to_json()["combination"] == ["1", "-3"]

    def test_reports_witness(self):
        h = series_H(10)
        certificate = quasimodular_span_check(h * h, [eisenstein_G2(10)], 10)
        assert not certificate.ok
        assert certificate.witness == 2
        assert certificate.combination is None

    def test_order_beyond_truncation(self):
        with pytest.raises(ValueError):
            quasimodular_span_check(series_H(4), [eisenstein_G2(8)], 6)

    @pytest.mark.parametrize("req", [
        series_request(M0, 1, "1", free=(1, 1), order=10),
        series_request(M1, 1, "1/2", free=(1,), order=10),
        series_request(M1, 2, "1", fixed=(1,), free=(1,), order=6),
    ])
    def test_assembled_series_lies_in_span(self, req):
        assert assembled_span_check(req).ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
