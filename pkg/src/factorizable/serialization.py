"""JSON documents for matrices, unit systems, channels and traces.

Complex numbers are ``[re, im]`` pairs.  Floats are written with Python's
shortest round-trip representation, so reading back is exact.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .channels import Channel
from .free_product import FiniteDimTrace, trace_from_pair
from .matrix_core import DEFAULT_POLICY, TolerancePolicy
from .matrix_units import MatrixUnitSystem
from .tracial import FiniteTracialAlgebra


class MalformedInput(ValueError):
    """Input document does not match the expected schema or invariants."""


def _number(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MalformedInput(f"expected a number, got {x!r}")
    if not math.isfinite(x):
        raise MalformedInput("non-finite number")
    return float(x)


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise MalformedInput("a matrix needs 'dim' and 'entries'")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise MalformedInput(f"bad matrix dim {dim!r}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise MalformedInput(f"expected {dim} rows")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MalformedInput(f"row {i} does not have {dim} entries")
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise MalformedInput(f"entry ({i}, {j}) is not an [re, im] pair")
            out[i, j] = complex(_number(z[0]), _number(z[1]))
    return out


def units_array_to_json(units: np.ndarray) -> list:
    return [[matrix_to_json(m) for m in row] for row in units]


def units_array_from_json(doc, n: int | None = None) -> np.ndarray:
    if not isinstance(doc, list) or not doc:
        raise MalformedInput("unit system must be a non-empty n x n array of matrices")
    n = len(doc) if n is None else n
    if len(doc) != n or any(not isinstance(r, list) or len(r) != n for r in doc):
        raise MalformedInput(f"unit system must be {n} x {n}")
    mats = [[matrix_from_json(m) for m in row] for row in doc]
    d = mats[0][0].shape[0]
    if any(m.shape[0] != d for row in mats for m in row):
        raise MalformedInput("unit system matrices differ in dimension")
    return np.array(mats)


def units_to_json(sys: MatrixUnitSystem) -> dict:
    return {"n": sys.n, "d": sys.d, "units": units_array_to_json(sys.units)}


def units_from_json(doc) -> MatrixUnitSystem:
    if not isinstance(doc, dict) or "units" not in doc:
        raise MalformedInput("unit system document needs 'units'")
    return MatrixUnitSystem(units_array_from_json(doc["units"], doc.get("n")))


def channel_to_json(ch: Channel) -> dict:
    return {"n": ch.n, "choi": matrix_to_json(ch.choi)}


def channel_from_json(doc) -> Channel:
    """Accepts ``{"n", "choi"}`` or a bare matrix of square dimension."""
    try:
        if isinstance(doc, dict) and "choi" in doc:
            choi = matrix_from_json(doc["choi"])
            if "n" in doc:
                return Channel(doc["n"], choi)
            return Channel.from_choi(choi)
        return Channel.from_choi(matrix_from_json(doc))
    except MalformedInput:
        raise
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc


def trace_to_json(tr: FiniteDimTrace) -> dict:
    return {
        "n": tr.n,
        "blocks": list(tr.algebra.blocks),
        "weights": list(tr.algebra.weights),
        "g_units": [units_array_to_json(s.units) for s in tr.g_units],
        "f_units": [units_array_to_json(s.units) for s in tr.f_units],
    }


def trace_from_json(doc, pol: TolerancePolicy = DEFAULT_POLICY) -> FiniteDimTrace:
    """Parse and validate; any violated invariant raises :class:`MalformedInput`."""
    if not isinstance(doc, dict):
        raise MalformedInput("trace document must be an object")
    for key in ("n", "blocks", "weights", "g_units", "f_units"):
        if key not in doc:
            raise MalformedInput(f"trace document is missing {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise MalformedInput(f"bad n {n!r}")
    try:
        algebra = FiniteTracialAlgebra(tuple(doc["blocks"]), tuple(_number(w) for w in doc["weights"]))
        gs = [MatrixUnitSystem(units_array_from_json(b, n)) for b in doc["g_units"]]
        fs = [MatrixUnitSystem(units_array_from_json(b, n)) for b in doc["f_units"]]
        return trace_from_pair(n, gs, fs, algebra, pol)
    except MalformedInput:
        raise
    except (ValueError, TypeError) as exc:
        raise MalformedInput(str(exc)) from exc


def complex_array_to_json(a: np.ndarray):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_array_to_json(x) for x in a]


def dumps(doc) -> str:
    """Deterministic serialization: sorted keys, fixed indentation."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
