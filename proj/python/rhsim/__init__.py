"""Rowhammer aggressor-tracker simulator.

Settings are the same keys the config files and ``--set`` use; values may be
given as Python numbers or booleans.
"""

import csv
import io

from ._core import (
    ConfigError,
    __version__,
    analytic_sampling_rate,
    known_keys,
    standard_suite,
    storage_bytes,
)
from . import _core

__all__ = [
    "ConfigError",
    "__version__",
    "analytic_sampling_rate",
    "budgets",
    "graphene_capacity",
    "known_keys",
    "simulate",
    "standard_suite",
    "storage_bytes",
    "sweep",
    "sweep_csv",
]


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_text(v) for v in value)
    return str(value)


def _settings(kwargs):
    return {k: _text(v) for k, v in kwargs.items()}


def simulate(**settings):
    """One refresh window. Returns a dict of result fields."""
    return _core.simulate(_settings(settings))


def budgets(**settings):
    return _core.budgets(_settings(settings))


def graphene_capacity(trh, **settings):
    return _core.graphene_capacity(_settings(settings), trh)


def sweep_csv(workers=1, **settings):
    """Sweep CSV text, byte-identical to ``rhsim sweep`` for the same settings."""
    return _core.sweep_csv(_settings(settings), workers)


def sweep(workers=1, **settings):
    """Sweep rows as dicts (strings, as in the CSV)."""
    return list(csv.DictReader(io.StringIO(sweep_csv(workers=workers, **settings))))
