"""
Invariant Commands

`invariant` prints N^δ with its refined companion, `bg` the same result
with the refined invariant in front.
"""
import argparse

from tmoebius.multiplicity import compute_invariant

from .common import invariant_request_of
from .output import CommandResult
from .registry import register_command


def _result(args: argparse.Namespace, headline: str) -> CommandResult:
    req = invariant_request_of(args)
    result = compute_invariant(req, args.jobs)
    payload = result.to_json()
    value = payload["N"] if headline == "N" else str(result.BG)
    return CommandResult(
        payload=payload,
        columns=(headline, "diagrams", "markings", "convention"),
        rows=[(value, result.diagram_count, result.marking_count, result.convention.value)],
    )


@register_command("invariant", "Compute the invariant N for a surface, genus, class and (μ, ν)")
def invariant_command(args: argparse.Namespace) -> CommandResult:
    return _result(args, "N")


@register_command("bg", "Compute the refined invariant BG as a Laurent polynomial in q^(1/2)")
def bg_command(args: argparse.Namespace) -> CommandResult:
    return _result(args, "BG")
