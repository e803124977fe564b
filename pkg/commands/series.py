"""
Series Command

Coefficient table of the generating series in y, optionally with the
product factorization of every shape.
"""
import argparse

from tmoebius.core import format_number
from tmoebius.enumeration import enumerate_weighted_shapes
from tmoebius.series import SeriesRequest, factorized_form, generating_series

from .common import convention_of, genus_of, half_int_of, partitions_of, surface_of
from .output import CommandResult
from .registry import register_command


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--factorized", action="store_true", help="also list the per-shape factorizations")


@register_command("series", "Generating series in the fiber degree up to y^order", _configure)
def series_command(args: argparse.Namespace) -> CommandResult:
    fixed, free = partitions_of(args)
    req = SeriesRequest(
        surface_of(args), genus_of(args), half_int_of(args, "b"), fixed, free, args.order, convention_of(args)
    )
    req.validate()
    series = generating_series(req, args.jobs)
    coefficients = [
        {"exponent": n, "coefficient": format_number(c)} for n, c in enumerate(series.coefficients) if c
    ]
    payload = {
        "surface": str(req.surface),
        "genus": req.genus,
        "b": str(req.b),
        "order": req.order,
        "coefficients": coefficients,
    }
    if args.factorized:
        payload["factorizations"] = [
            f.to_json()
            for f in (
                factorized_form(s, req.surface, req.fixed, req.free, req.convention)
                for s in enumerate_weighted_shapes(req.surface, req.genus, req.profile)
            )
            if not f.is_zero()
        ]
    return CommandResult(
        payload=payload,
        columns=("exponent", "coefficient"),
        rows=[(c["exponent"], c["coefficient"]) for c in coefficients],
    )
