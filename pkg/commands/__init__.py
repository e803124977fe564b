"""
tmoebius Commands Package

Subcommands of the tmoebius command line and the verification suites.
"""

# Import all command modules so their decorators fill the registry
from .registry import get_registered_commands, get_registered_suites, register_command, register_suite
from . import diagrams, invariants, regularity, series, verify

__all__ = [
    "get_registered_commands",
    "get_registered_suites",
    "register_command",
    "register_suite",
]
