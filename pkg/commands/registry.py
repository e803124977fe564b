"""
Command Registry

Name-keyed tables for the tmoebius subcommands and for the checks `verify`
can run. cli.py builds one subparser per command entry; `verify` looks
suites up by name.
"""
from typing import Any, Callable, Dict, Optional

# name -> entry, in registration order
_COMMAND_REGISTRY: Dict[str, Dict[str, Any]] = {}
_SUITE_REGISTRY: Dict[str, Dict[str, Any]] = {}


def register_command(name: str, description: str, configure: Optional[Callable] = None):
    """
    Register a subcommand handler under its command-line name.

    Args:
        name: Subcommand as typed after `tmoebius`
        description: One-line help shown by `tmoebius --help`
        configure: Adds the subcommand's own flags on top of the shared request flags

    Returns:
        A decorator that records the handler and returns it unchanged

    Raises:
        ValueError: when the name is taken
    """
    def decorator(func):
        if name in _COMMAND_REGISTRY:
            raise ValueError(f"Command with name '{name}' already registered")

        _COMMAND_REGISTRY[name] = {
            "function": func,
            "description": description,
            "configure": configure,
            "name": name,
        }
        return func
    return decorator


def register_suite(name: str, description: str):
    """
    Register a check group for `verify --suite NAME`.

    The decorated function takes the parsed arguments and returns
    (check name, passed, detail) tuples.
    """
    def decorator(func):
        if name in _SUITE_REGISTRY:
            raise ValueError(f"Suite with name '{name}' already registered")

        _SUITE_REGISTRY[name] = {
            "function": func,
            "description": description,
            "name": name,
        }
        return func
    return decorator


def get_registered_commands() -> Dict[str, Dict[str, Any]]:
    """Subcommand entries keyed by name"""
    return _COMMAND_REGISTRY


def get_registered_suites() -> Dict[str, Dict[str, Any]]:
    """Suite entries keyed by name"""
    return _SUITE_REGISTRY
