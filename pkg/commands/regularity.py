"""
Regularity Command

Fits the relative count of a set of shapes along a ray of end values and
prints the fit certificate.
"""
import argparse

from tmoebius.diagram import validate
from tmoebius.enumeration import enumerate_shapes
from tmoebius.errors import InvalidRequestError
from tmoebius.regularity import RelativeCount, SampleFamily, fit_regularity

from .common import convention_of, genus_of, half_int_of, int_list, load_diagram, surface_of, violations_error
from .output import CommandResult
from .registry import register_command


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--base", help="base point of the ray, comma list of end values")
    parser.add_argument("--direction", help="direction of the ray, comma list")
    parser.add_argument("--fixed", type=int, default=0, help="how many leading entries are fixed ends")
    parser.add_argument("--holdout", type=int, default=None, help="held-out samples per residue class")
    parser.add_argument("--degree-bound", type=int, default=None, help="override the degree bound")
    parser.add_argument("--shape", default=None, help="JSON file with one weight-free shape carrying degrees")


@register_command("regularity", "Fit a quasi-polynomial to relative counts along a ray", _configure)
def regularity_command(args: argparse.Namespace) -> CommandResult:
    surface = surface_of(args)
    base = int_list(args.base, "base")
    direction = int_list(args.direction, "direction")
    if len(base) != len(direction):
        raise InvalidRequestError("--base and --direction need the same number of entries")
    if not 0 <= args.fixed <= len(base):
        raise InvalidRequestError(f"--fixed must lie between 0 and {len(base)}")

    if args.shape:
        shape, file_surface = load_diagram(args.shape)
        surface = file_surface if file_surface is not None else surface
        if len(shape.ends) != len(base):
            raise InvalidRequestError(f"the shape has {len(shape.ends)} ends but --base has {len(base)} entries")
        structural = [v for v in validate(shape, surface) if v.condition in ("structure", "degree")]
        if structural:
            raise violations_error([str(v) for v in structural])
        shapes = (shape,)
    else:
        shapes = enumerate_shapes(surface, genus_of(args), half_int_of(args, "a"), len(base))

    relative = RelativeCount(tuple(shapes), surface, args.fixed, convention_of(args))
    fit = fit_regularity(relative, SampleFamily(base, direction), args.degree_bound, args.holdout)
    payload = fit.to_json()
    return CommandResult(
        payload=payload,
        columns=("class", "coefficients"),
        rows=[(" ".join(map(str, c["class"])), " ".join(c["coefficients"])) for c in payload["residue_classes"]],
    )
