"""
Diagram Commands

`diagrams` streams the enumerated floor diagrams as JSON lines;
`markings` lists the markings of one diagram read from a file.
"""
import argparse
import logging

from tmoebius.core import format_number
from tmoebius.diagram import (
    HomologyClass, aut_order, diagram_to_json, genus, homology_class, tangency_profile, validate,
)
from tmoebius.enumeration import (
    check_request, classify_components, enumerate_diagrams, enumerate_markings, iter_diagrams,
)
from tmoebius.errors import InvalidRequestError
from tmoebius.multiplicity import MarkedDiagram, marked_mult

from .common import (
    convention_of, genus_of, half_int_of, load_diagram, partitions_of, surface_of, violations_error,
)
from .output import CommandResult
from .registry import register_command

logger = logging.getLogger("tmoebius.commands")


def _configure_diagrams(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--count-only", action="store_true", help="print only the number of diagrams")


@register_command("diagrams", "Enumerate floor diagrams of a genus, class and tangency profile", _configure_diagrams)
def diagrams_command(args: argparse.Namespace) -> CommandResult:
    surface = surface_of(args)
    g = genus_of(args)
    cls = HomologyClass(half_int_of(args, "a"), half_int_of(args, "b"))
    fixed, free = partitions_of(args)
    profile = fixed + free
    problems = check_request(surface, g, cls, profile)
    if problems:
        raise InvalidRequestError("; ".join(problems))

    if args.count_only:
        count = sum(1 for _ in iter_diagrams(surface, g, cls, profile, args.jobs))
        return CommandResult(payload={"count": count}, columns=("count",), rows=[(count,)])
    if args.format == "json":
        # written line by line as the enumeration produces them
        stream = iter_diagrams(surface, g, cls, profile, args.jobs)
        return CommandResult(records=(diagram_to_json(d, surface) for d in stream), json_lines=True)

    diagrams = enumerate_diagrams(surface, g, cls, profile, args.jobs)
    return CommandResult(
        columns=("index", "vertices", "edges", "ends", "aut"),
        rows=[(i, len(d.vertices), len(d.edges), len(d.ends), aut_order(d)) for i, d in enumerate(diagrams)],
    )


def _configure_markings(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--diagram", required=True, help="JSON file holding one floor diagram")


@register_command("markings", "List the markings of a diagram with their multiplicities", _configure_markings)
def markings_command(args: argparse.Namespace) -> CommandResult:
    diagram, file_surface = load_diagram(args.diagram)
    surface = file_surface if file_surface is not None else surface_of(args)
    violations = validate(diagram, surface)
    if violations:
        raise violations_error([str(v) for v in violations])

    fixed, free = partitions_of(args)
    if not fixed.parts and not free.parts:
        free = tangency_profile(diagram)
    if fixed + free != tangency_profile(diagram):
        raise InvalidRequestError(
            f"‖μ‖+‖ν‖ must match the diagram's tangency profile {tangency_profile(diagram)}"
        )

    convention = convention_of(args)
    records = []
    for marking in enumerate_markings(diagram, fixed, free):
        md = MarkedDiagram(diagram, marking, surface, convention)
        report = classify_components(diagram, marking.cells)
        records.append({
            "placements": [str(cell) for cell in marking.placements],
            "fixed_ends": sorted(marking.fixed_ends),
            "cycles": report.odd_cycles,
            "components": [str(c) for c in report.components],
            "multiplicity": format_number(marked_mult(md)),
        })
    logger.info(f"{len(records)} markings for a genus {genus(diagram)} diagram of class {homology_class(diagram)}")
    return CommandResult(
        payload={"genus": genus(diagram), "class": str(homology_class(diagram)), "markings": records},
        records=records,
        columns=("placements", "cycles", "multiplicity"),
        rows=[(" ".join(r["placements"]), r["cycles"], r["multiplicity"]) for r in records],
    )
