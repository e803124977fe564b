"""
Verification Suites

`verify --suite NAME|all` re-runs the acceptance checks and prints a
pass/fail matrix. Each suite returns (check, passed, detail) triples; any
failure turns the exit code to 2.
"""
import argparse
import io
import json
import logging
import random
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

from sympy.utilities.iterables import multiset_combinations, partitions

from tmoebius.catalog import example_table, genus2_catalogue, genus2_family, genus2_instances, parity_example_shapes
from tmoebius.core import HalfInt, Partition, eisenstein_G2, series_H, series_H0, series_H1, sigma1, sigma1_tilde
from tmoebius.diagram import (
    HomologyClass, SurfaceKind, VertexKind, canonical_form, diagram_to_json, genus, homology_class,
    tangency_profile, validate,
)
from tmoebius.enumeration import enumerate_diagrams, enumerate_shapes, enumerate_skeletons, enumerate_weighted_shapes
from tmoebius.errors import ChamberCrossingError, InvalidRequestError, RegularityFitError
from tmoebius.multiplicity import ExponentConvention, InvariantRequest, calibrate_genus1, compute_invariant
from tmoebius.regularity import (
    RelativeCount, SampleFamily, build_extended, fit_regularity, invariant_via_weightings, minor_analysis,
)
from tmoebius.series import SeriesRequest, assembled_span_check, factorized_form, per_diagram_series

from .common import add_common_arguments
from .output import CommandResult, render
from .registry import get_registered_commands, get_registered_suites, register_command, register_suite

logger = logging.getLogger("tmoebius.verify")

Check = Tuple[str, bool, str]


@register_suite("series", "H = G2(y) - G2(y^2) and the even/odd split of H")
def series_suite(args: argparse.Namespace) -> List[Check]:
    order = 200
    h, g2 = series_H(order), eisenstein_G2(order)
    identity = h.first_difference(g2 - g2.substitute_power(2).truncate(order))
    halves = series_H0(order).agrees_with(h.even_part()) and series_H1(order).agrees_with(h.odd_part())
    return [
        ("H = G2(y) - G2(y^2) to y^200", identity is None, f"first difference at {identity}"),
        ("H0, H1 are the even and odd parts of H", halves, ""),
    ]


def _splits(parts: List[int]):
    """Every (μ, ν) with μ + ν = parts, μ taken as a sub-multiset"""
    for size in range(len(parts) + 1):
        for fixed in multiset_combinations(parts, size):
            free = list(parts)
            for part in fixed:
                free.remove(part)
            yield Partition(tuple(fixed)), Partition(tuple(free))


def _desk_requests(max_genus: int, max_doubled_a: int, max_doubled_b: int):
    for surface in SurfaceKind:
        for g in range(1, max_genus + 1):
            for doubled_a in range(1, max_doubled_a + 1):
                for doubled_b in range(1, max_doubled_b + 1):
                    cls = HomologyClass(HalfInt(doubled_a), HalfInt(doubled_b))
                    if not cls.parity_ok(surface):
                        continue
                    for profile in partitions(doubled_b):
                        parts = sorted((p for p, m in profile.items() for _ in range(m)), reverse=True)
                        for fixed, free in _splits(parts):
                            yield InvariantRequest(surface, g, cls, fixed, free)


@register_suite("q1", "BG at q = 1 equals N and BG is palindromic")
def q1_suite(args: argparse.Namespace) -> List[Check]:
    checks = []
    for req in _desk_requests(3, 6, 4):
        result = compute_invariant(req, args.jobs)
        name = f"{req.surface} g={req.genus} {req.homology} μ={req.fixed} ν={req.free}"
        ok = result.BG.at_one() == result.N and result.BG.is_palindromic()
        checks.append((name, ok, f"N={result.N} BG={result.BG}"))
    return checks


@register_suite("genus1", "Genus-1 invariants against the closed formula under both conventions")
def genus1_suite(args: argparse.Namespace) -> List[Check]:
    report = calibrate_genus1(max_doubled_a=6, max_doubled_b=4, jobs=args.jobs)
    checks = []
    for p in report.points:
        a = p.a.as_fraction()
        bracket = sigma1(p.a.doubled // 2) if p.a.is_integer() and p.b.is_integer() else 0
        doubled_ground = p.a.doubled ** p.b.doubled * (2 * sigma1_tilde(p.a.doubled) + bracket)
        label = f"{p.surface} a={p.a} b={p.b}"
        checks.append((f"{label} val-1: a·N = formula",
                       a * p.values[ExponentConvention.VAL_MINUS_ONE] == p.formula,
                       f"N={p.values[ExponentConvention.VAL_MINUS_ONE]} formula={p.formula}"))
        checks.append((f"{label} val: N = formula with doubled ground term",
                       p.values[ExponentConvention.VAL] == doubled_ground,
                       f"N={p.values[ExponentConvention.VAL]}"))
    matching = [c.value for c in report.matching_conventions()]
    logger.info(f"Conventions matching the genus-1 formula exactly: {matching or 'none'}")
    return checks


@register_suite("figures", "Catalogue diagrams: genus, class, tangency and presence in the enumeration")
def figures_suite(args: argparse.Namespace) -> List[Check]:
    checks = []
    for entry in example_table():
        d = entry.diagram
        stated = (
            not validate(d, entry.surface)
            and genus(d) == entry.genus
            and homology_class(d) == entry.homology
            and tangency_profile(d) == entry.profile
        )
        checks.append((f"{entry.name} matches its stated data", stated, f"genus {genus(d)}, {homology_class(d)}"))
        codes = {canonical_form(x) for x in enumerate_diagrams(entry.surface, entry.genus, entry.homology, entry.profile, args.jobs)}
        checks.append((f"{entry.name} is enumerated", canonical_form(d) in codes, f"{len(codes)} diagrams"))

    shapes = enumerate_weighted_shapes(SurfaceKind.M0, 2, Partition((1, 1)))
    families = set()
    for shape in shapes:
        try:
            families.add(genus2_family(shape))
        except ValueError as e:
            checks.append(("genus-2 shape fits a family", False, str(e)))
    checks.append(("genus-2 shapes cover families a, b, c", families == {"a", "b", "c"}, ",".join(sorted(families))))
    codes = {canonical_form(s) for s in shapes}
    for name, instance in genus2_instances().items():
        checks.append((f"genus-2 instance {name} is enumerated", canonical_form(instance.without_degrees()) in codes, ""))
    for surface in SurfaceKind:
        for n_ends in range(1, 5):
            catalogue = {canonical_form(s) for s in genus2_catalogue(surface, n_ends)}
            found = {canonical_form(s) for s in enumerate_weighted_shapes(surface, 2, Partition((1,) * n_ends))}
            checks.append((
                f"{surface} genus-2 shapes with 1^{n_ends} match the catalogue",
                catalogue == found,
                f"{len(found)} enumerated, {len(catalogue)} catalogued, {len(found ^ catalogue)} unmatched",
            ))
    return checks


@register_suite("minors", "Nonzero maximal minors split into ground trees and odd cycles with Z/2 cokernels")
def minors_suite(args: argparse.Namespace) -> List[Check]:
    checks = []
    for surface in SurfaceKind:
        for g in (1, 2, 3):
            for n_ends in range(1, 5):
                for skeleton in enumerate_skeletons(g, n_ends, 2):
                    if len(skeleton.floors) > 3:
                        continue
                    # degrees only enter the right-hand side of A·w = d
                    shape = skeleton.with_degrees({
                        v.id: HalfInt(1 if v.kind is VertexKind.GROUND else 2) for v in skeleton.floors
                    })
                    eg = build_extended(shape, surface)
                    if len(eg.columns) > 12:
                        continue
                    reports = minor_analysis(eg, 12)
                    bad = [r for r in reports if not r.consistent]
                    nonzero = sum(1 for r in reports if r.determinant)
                    checks.append((
                        f"{surface} g={g} shape {len(shape.vertices)}v/{len(shape.edges)}e/{n_ends} ends",
                        not bad,
                        f"{nonzero} nonzero minors" + (f", first bad {bad[0].to_json()}" if bad else ""),
                    ))
    return checks


@register_suite("factorization", "Per-shape series factor into G2(y^2), H, H0, H1 derivatives")
def factorization_suite(args: argparse.Namespace) -> List[Check]:
    checks = []
    order = 20
    for surface, g, profile in (
        (SurfaceKind.M0, 1, Partition((1, 1))),
        (SurfaceKind.M1, 1, Partition((1, 1))),
        (SurfaceKind.M1, 1, Partition((1,))),
        (SurfaceKind.M0, 2, Partition((1, 1))),
        (SurfaceKind.M1, 2, Partition((2,))),
    ):
        fixed, free = Partition(), profile
        for index, shape in enumerate(enumerate_weighted_shapes(surface, g, profile)):
            direct = per_diagram_series(shape, surface, fixed, free, order)
            factored = factorized_form(shape, surface, fixed, free).expand(order)
            difference = direct.first_difference(factored)
            checks.append((f"{surface} g={g} {profile} shape {index}", difference is None, f"difference at {difference}"))
        req = SeriesRequest(surface, g, HalfInt(profile.norm()), fixed, free, 10)
        if not req.problems():
            certificate = assembled_span_check(req, args.jobs)
            checks.append((f"{surface} g={g} {profile} assembled series in span", certificate.ok,
                           f"witness {certificate.witness}"))
    return checks


def _fresh_points_agree(fit, relative: RelativeCount, family: SampleFamily, count: int = 100) -> bool:
    return all(fit.evaluate(t) == relative.value(family.point(t)) for t in range(fit.samples, fit.samples + count))


@register_suite("regularity", "Exact quasi-polynomial fits on in-chamber rays")
def regularity_suite(args: argparse.Namespace) -> List[Check]:
    checks = []
    m0 = SurfaceKind.M0

    shape = parity_example_shapes()["a"]
    relative = RelativeCount((shape,), m0, 2)
    family = SampleFamily((5, 7), (1, 1))
    try:
        fit = fit_regularity(relative, family)
        checks.append(("parity example: no single polynomial", not fit.is_polynomial, ""))
        checks.append(("parity example: two residue classes", len(fit.residue_classes) == 2, ""))
        checks.append(("parity example: 100 fresh points reproduced", _fresh_points_agree(fit, relative, family), ""))
    except (ChamberCrossingError, RegularityFitError) as e:
        checks.append(("parity example fit", False, str(e)))

    for g, a, fixed_count, base in (
        (1, HalfInt(2), 0, (3, 5)),
        (2, HalfInt(2), 0, (3, 5)),
        (2, HalfInt(2), 1, (3, 5)),
        (2, HalfInt(3), 1, (4, 6)),
    ):
        label = f"genus {g}, a={a}, |μ|={fixed_count}, ray {base}+t(1,1)"
        relative = RelativeCount(enumerate_shapes(m0, g, a, len(base)), m0, fixed_count)
        family = SampleFamily(base, (1, 1))
        try:
            fit = fit_regularity(relative, family)
            checks.append((f"{label}: single polynomial", fit.is_polynomial, ""))
            checks.append((f"{label}: 100 fresh points reproduced", _fresh_points_agree(fit, relative, family), ""))
        except (ChamberCrossingError, RegularityFitError) as e:
            checks.append((f"{label} fit", False, str(e)))
    return checks


@register_suite("crosspath", "Diagram path and weighting path give the same N")
def crosspath_suite(args: argparse.Namespace) -> List[Check]:
    rng = random.Random(20240)
    pool = list(_desk_requests(2, 3, 3))
    checks = []
    for req in rng.sample(pool, min(20, len(pool))):
        via_diagrams = compute_invariant(req, args.jobs).N
        via_weightings = invariant_via_weightings(req)
        checks.append((
            f"{req.surface} g={req.genus} {req.homology} μ={req.fixed} ν={req.free}",
            Fraction(via_diagrams) == Fraction(via_weightings),
            f"{via_diagrams} vs {via_weightings}",
        ))
    return checks


def _rendered(argv: List[str], jobs: int) -> str:
    """Run one subcommand in-process and return its JSON output"""
    command = get_registered_commands()[argv[0]]
    parser = argparse.ArgumentParser(prog=f"tmoebius {argv[0]}")
    add_common_arguments(parser)
    if command["configure"]:
        command["configure"](parser)
    args = parser.parse_args(argv[1:] + ["--jobs", str(jobs)])
    buffer = io.StringIO()
    render(command["function"](args), "json", buffer)
    return buffer.getvalue()


@register_suite("determinism", "Every subcommand prints the same bytes for 1, 4 and 8 workers")
def determinism_suite(args: argparse.Namespace) -> List[Check]:
    request = ["--surface", "m1", "--genus", "2", "--a", "3/2", "--b", "3/2", "--mu", "1", "--nu", "2"]
    checks = []
    with tempfile.TemporaryDirectory() as tmp:
        diagram_file = Path(tmp) / "diagram.json"
        entry = next(e for e in example_table() if e.name == "4b")
        diagram_file.write_text(json.dumps(diagram_to_json(entry.diagram, entry.surface)), encoding="utf-8")
        runs = {
            "invariant": ["invariant", *request],
            "bg": ["bg", *request],
            "diagrams": ["diagrams", *request],
            "markings": ["markings", "--diagram", str(diagram_file), "--mu", "1", "--nu", "2,1"],
            "series": ["series", "--genus", "1", "--b", "1", "--nu", "1,1", "--order", "12", "--factorized"],
            "regularity": ["regularity", "--genus", "1", "--a", "1", "--base", "3,5", "--direction", "1,1"],
            "verify": ["verify", "--suite", "series"],
        }
        for name, argv in sorted(runs.items()):
            outputs = {jobs: _rendered(argv, jobs) for jobs in (1, 4, 8)}
            same = len(set(outputs.values())) == 1
            checks.append((f"{name} output identical for 1, 4 and 8 workers", same, f"{len(outputs[1])} bytes"))
    return checks


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--suite", default="all", help="suite name or all")


@register_command("verify", "Run verification suites and print a pass/fail matrix", _configure)
def verify_command(args: argparse.Namespace) -> CommandResult:
    suites = get_registered_suites()
    if args.suite != "all" and args.suite not in suites:
        raise InvalidRequestError(f"unknown suite {args.suite!r}, expected one of {', '.join(sorted(suites))} or all")
    names = sorted(suites) if args.suite == "all" else [args.suite]

    records = []
    for name in names:
        logger.info(f"Running suite {name}")
        for check, passed, detail in suites[name]["function"](args):
            records.append({"suite": name, "check": check, "passed": passed, "detail": detail})
    failed = sum(1 for r in records if not r["passed"])
    if failed:
        logger.warning(f"{failed} of {len(records)} checks failed")
    return CommandResult(
        payload={"passed": not failed, "checks": records},
        columns=("suite", "check", "result", "detail"),
        rows=[(r["suite"], r["check"], "PASS" if r["passed"] else "FAIL", r["detail"]) for r in records],
        exit_code=2 if failed else 0,
    )
