"""
Shared Command Arguments

Common flags of every subcommand and their conversion into engine requests.
All validation happens here, before any computation starts.
"""
import argparse
import json
from typing import List, Optional, Tuple

from config import TMOEBIUS_SERIES_ORDER
from tmoebius.core import HalfInt, Partition
from tmoebius.diagram import FloorDiagram, HomologyClass, SurfaceKind, diagram_from_json
from tmoebius.errors import DiagramStructureError, InvalidRequestError
from tmoebius.multiplicity import ExponentConvention, InvariantRequest


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--surface", default="m0", help="m0 or m1")
    parser.add_argument("--genus", type=int, help="genus g ≥ 1")
    parser.add_argument("--a", help="E-degree as an exact fraction, e.g. 3/2")
    parser.add_argument("--b", help="F-degree as an exact fraction, e.g. 1")
    parser.add_argument("--mu", default="", help="fixed end weights, comma list")
    parser.add_argument("--nu", default="", help="free end weights, comma list")
    parser.add_argument("--format", choices=("json", "csv", "table"), default="json")
    parser.add_argument("--convention", default=None, help="val-1 (default) or val")
    parser.add_argument("--order", type=int, default=TMOEBIUS_SERIES_ORDER, help="series truncation order")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default TMOEBIUS_JOBS)")
    parser.add_argument("--out", default=None, help="write output to FILE instead of stdout")


def _wrap(kind: str, func, value):
    try:
        return func(value)
    except (ValueError, TypeError) as e:
        raise InvalidRequestError(f"invalid {kind}: {e}") from e


def surface_of(args: argparse.Namespace) -> SurfaceKind:
    return _wrap("--surface", SurfaceKind.parse, args.surface)


def convention_of(args: argparse.Namespace) -> ExponentConvention:
    if args.convention is None:
        return ExponentConvention.default()
    return _wrap("--convention", ExponentConvention.parse, args.convention)


def half_int_of(args: argparse.Namespace, name: str) -> HalfInt:
    value = getattr(args, name)
    if value is None:
        raise InvalidRequestError(f"--{name} is required")
    return _wrap(f"--{name}", HalfInt.parse, value)


def genus_of(args: argparse.Namespace) -> int:
    if args.genus is None:
        raise InvalidRequestError("--genus is required")
    if args.genus < 1:
        raise InvalidRequestError(f"--genus must be at least 1, got {args.genus}")
    return args.genus


def partitions_of(args: argparse.Namespace) -> Tuple[Partition, Partition]:
    return _wrap("--mu", Partition.parse, args.mu), _wrap("--nu", Partition.parse, args.nu)


def int_list(text: Optional[str], name: str) -> Tuple[int, ...]:
    if not text:
        raise InvalidRequestError(f"--{name} is required")
    try:
        return tuple(int(item) for item in text.split(","))
    except ValueError as e:
        raise InvalidRequestError(f"--{name} takes a comma list of integers, got {text!r}") from e


def invariant_request_of(args: argparse.Namespace, allow_parity: bool = False) -> InvariantRequest:
    """
    Build and validate an InvariantRequest from the common flags.

    The CLI rejects parity-violating classes up front; the library returns 0 for them.
    """
    fixed, free = partitions_of(args)
    req = InvariantRequest(
        surface_of(args),
        genus_of(args),
        HomologyClass(half_int_of(args, "a"), half_int_of(args, "b")),
        fixed,
        free,
        convention_of(args),
    )
    req.validate(allow_parity=allow_parity)
    return req


def load_diagram(path: str) -> Tuple[FloorDiagram, Optional[SurfaceKind]]:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as e:
        raise InvalidRequestError(f"cannot read diagram file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DiagramStructureError(f"{path} is not valid JSON: {e}") from e
    return diagram_from_json(payload)


def violations_error(messages: List[str]) -> InvalidRequestError:
    return InvalidRequestError("diagram is not a floor diagram: " + "; ".join(messages))
