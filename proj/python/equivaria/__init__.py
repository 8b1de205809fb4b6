"""Equivariant C*-algebra computations on finite systems.

Systems, bundles and groups may be given as a dict, a JSON string or a
builtin name ("z2-line", "S3", ...). Reports come back as dicts.
"""

import json as _json

from . import _equivaria as _core
from ._equivaria import (
    DEFAULT_TOL,
    SCHEMA,
    EquivariaError,
    InputError,
    NumericError,
    ValidationError,
    builtin_groups,
    suite_names,
)

__all__ = [
    "DEFAULT_TOL",
    "SCHEMA",
    "EquivariaError",
    "InputError",
    "NumericError",
    "ValidationError",
    "builtin_groups",
    "canonical",
    "cocycle",
    "dataset",
    "datasets",
    "fixed_point_algebra",
    "green_julg",
    "irreps",
    "morita",
    "run_suite",
    "spectrum",
    "suite_names",
]


def _system_text(obj):
    if obj is None:
        return ""
    if isinstance(obj, dict):
        return _json.dumps(obj)
    text = obj.strip()
    if text.startswith("{"):
        return text
    if text in dict(_core.datasets()):
        return _json.dumps({"builtin": text})
    return _json.dumps({"builtin": text, "params": {}})


def _group_text(obj):
    if isinstance(obj, dict):
        return _json.dumps(obj)
    text = obj.strip()
    return text if text.startswith("{") else _json.dumps(text)


def datasets():
    """(name, description) pairs of the bundled datasets."""
    return list(_core.datasets())


def dataset(name):
    return _json.loads(_core.dataset(name))


def canonical(system):
    """Canonical JSON text of a system or bundle."""
    return _core.canonical(_system_text(system))


def irreps(group, seed=0, tol=DEFAULT_TOL):
    return _json.loads(_core.irreps(_group_text(group), seed, tol))


def spectrum(system, seed=0, tol=DEFAULT_TOL):
    return _json.loads(_core.spectrum(_system_text(system), seed, tol))


def morita(system, seed=0, tol=DEFAULT_TOL):
    return _json.loads(_core.morita(_system_text(system), seed, tol))


def green_julg(system):
    return _json.loads(_core.green_julg(_system_text(system)))


def run_suite(name, system=None, seed=0, tol=DEFAULT_TOL):
    return _json.loads(_core.run_suite(name, _system_text(system), seed, tol))


def fixed_point_algebra(system, tol=DEFAULT_TOL):
    """Basis of the fixed-point algebra as a list of complex numpy arrays."""
    return _core.fixed_point_algebra(_system_text(system), tol)


def cocycle(system, w, x):
    return _core.cocycle(_system_text(system), w, x)
