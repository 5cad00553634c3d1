"""Command-line front end.

    factorizable units {standard|random|from-unitaries|validate|intertwine}
    factorizable channel {choi|apply|verify|from-ancilla|distance}
    factorizable trace {gen|phi|correlate|decompose|combine|fiber}
    factorizable algebra {span|commutant|blocks}

Every command writes one JSON document to stdout (or ``--out``).  Exit
codes: 0 success, 1 a verification failed, 2 malformed input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import channels as chn
from . import free_product as fp
from . import matrix_units as mu
from . import star_algebra as sa
from .matrix_core import DEFAULT_POLICY, TolerancePolicy, adjoint, is_unitary, max_abs
from .serialization import (
    MalformedInput,
    channel_from_json,
    channel_to_json,
    complex_array_to_json,
    dumps,
    matrix_from_json,
    matrix_to_json,
    trace_from_json,
    trace_to_json,
    units_from_json,
    units_to_json,
)
from .tracial import FiniteTracialAlgebra

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED = 0, 1, 2


class UsageError(Exception):
    pass


def report(checks: Sequence[dict], tolerance: Optional[float] = None, seed: Optional[int] = None) -> dict:
    """Summary document over named checks ``{"name", "pass", "residual"}``.

    ``pass`` is the conjunction of all checks; a failing set quotes its
    worst residual.  Tolerance and seed are recorded when given.
    """
    checks = [dict(c) for c in checks]
    doc = {"checks": checks, "pass": all(c["pass"] for c in checks)}
    if not doc["pass"]:
        failing = [c for c in checks if not c["pass"]]
        worst = max(failing, key=lambda c: c.get("residual") or 0.0)
        doc["worst_check"] = worst["name"]
        doc["worst_residual"] = worst.get("residual")
    if tolerance is not None:
        doc["tolerance"] = tolerance
    if seed is not None:
        doc["seed"] = seed
    return doc


def _check(name: str, passed: bool, residual: float) -> dict:
    return {"name": name, "pass": bool(passed), "residual": float(residual)}


def _channel_checks(r: chn.ChannelReport, pol: TolerancePolicy) -> list[dict]:
    lam = r.min_eigenvalue
    return [
        _check("cp", r.cp, float("inf") if np.isnan(lam) else max(0.0, -lam)),
        _check("unital", r.unital, r.unital_residual),
        _check("tp", r.trace_preserving, r.tp_residual),
    ]


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: Optional[str], flag: str) -> list[int]:
    if not text:
        raise UsageError(f"{flag} is required")
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from exc


def _float_list(text: Optional[str], flag: str) -> list[float]:
    if not text:
        raise UsageError(f"{flag} is required")
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from exc


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _load(args) -> object:
    if args.input is None or args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInput(f"cannot read {args.input}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def _field(doc, key):
    if not isinstance(doc, dict) or key not in doc:
        raise MalformedInput(f"input document is missing {key!r}")
    return doc[key]


def _policy(args) -> TolerancePolicy:
    return TolerancePolicy.uniform(args.eps) if args.eps is not None else DEFAULT_POLICY


# ---------------------------------------------------------------------------
# units


def cmd_units(args, pol):
    action = args.action
    if action == "standard":
        return units_to_json(mu.standard_units(_require(args.n, "--n"))), EXIT_OK
    if action == "random":
        sys_ = mu.random_unital_embedding(_require(args.n, "--n"), _require(args.d, "--d"),
                                          _require(args.seed, "--seed"))
        doc = units_to_json(sys_)
        doc["seed"] = args.seed
        return doc, EXIT_OK
    if action == "from-unitaries":
        doc = _load(args)
        us = [matrix_from_json(m) for m in _field(doc, "unitaries")]
        n = args.n if args.n is not None else len(us) + 1
        return units_to_json(mu.units_from_unitaries(n, us, pol)), EXIT_OK
    if action == "validate":
        r = mu.validate_units(units_from_json(_load(args)), pol)
        doc = report([_check(r.worst_relation, r.passed, r.max_residual)], pol.eps_eq)
        doc["max_residual"] = r.max_residual
        return doc, EXIT_OK if r.passed else EXIT_FAIL
    if action == "intertwine":
        doc = _load(args)
        f, fprime = units_from_json(_field(doc, "f")), units_from_json(_field(doc, "fp"))
        u = mu.intertwiner(f, fprime, pol)
        unit_res = max_abs(u @ adjoint(u) - np.eye(u.shape[0]))
        int_res = max_abs(u @ fprime.units @ adjoint(u) - f.units)
        out = report([_check("unitary", unit_res < pol.eps_eq, unit_res),
                      _check("intertwines", int_res < 10 * pol.eps_eq, int_res)], pol.eps_eq)
        out["u"] = matrix_to_json(u)
        return out, EXIT_OK if out["pass"] else EXIT_FAIL
    raise UsageError(f"unknown units action {action!r}")


# ---------------------------------------------------------------------------
# channel

NAMED_MAPS = {
    "identity": chn.identity_channel,
    "depolarizing": chn.depolarizing_channel,
    "transpose": chn.transpose_map,
}


def _ancilla(doc, args) -> FiniteTracialAlgebra:
    blocks = doc.get("blocks") if isinstance(doc, dict) else None
    weights = doc.get("weights") if isinstance(doc, dict) else None
    if args.blocks:
        blocks = _int_list(args.blocks, "--blocks")
    if args.weights:
        weights = _float_list(args.weights, "--weights")
    if blocks is None or weights is None:
        raise MalformedInput("ancilla blocks and weights are required")
    return FiniteTracialAlgebra(tuple(blocks), tuple(weights))


def cmd_channel(args, pol):
    action = args.action
    if action == "choi":
        if args.map:
            if args.map not in NAMED_MAPS:
                raise UsageError(f"unknown map {args.map!r}; choose from {sorted(NAMED_MAPS)}")
            return channel_to_json(NAMED_MAPS[args.map](_require(args.n, "--n"))), EXIT_OK
        doc = _load(args)
        images = _field(doc, "images")
        n = len(images)
        values = np.array([[matrix_from_json(m) for m in row] for row in images])
        return channel_to_json(chn.choi_of_map(n, values)), EXIT_OK
    if action == "apply":
        doc = _load(args)
        ch = channel_from_json(_field(doc, "channel"))
        return {"result": matrix_to_json(chn.apply_choi(ch, matrix_from_json(_field(doc, "x"))))}, EXIT_OK
    if action == "verify":
        r = chn.verify_channel(channel_from_json(_load(args)), pol)
        doc = report(_channel_checks(r, pol), pol.eps_eq)
        doc.update(r.as_dict())
        return doc, EXIT_OK if r.passed else EXIT_FAIL
    if action == "from-ancilla":
        doc = _load(args)
        u = matrix_from_json(_field(doc, "u"))
        return channel_to_json(chn.channel_from_ancilla(u, _ancilla(doc, args), pol)), EXIT_OK
    if action == "distance":
        doc = _load(args)
        a, b = channel_from_json(_field(doc, "a")), channel_from_json(_field(doc, "b"))
        return {"distance": chn.channel_distance(a, b)}, EXIT_OK
    raise UsageError(f"unknown channel action {action!r}")


# ---------------------------------------------------------------------------
# trace


def cmd_trace(args, pol):
    action = args.action
    if action == "gen":
        tr = fp.random_trace(_require(args.n, "--n"), _int_list(args.blocks, "--blocks"),
                             _float_list(args.weights, "--weights"), _require(args.seed, "--seed"), pol)
        doc = trace_to_json(tr)
        doc["seed"] = args.seed
        return doc, EXIT_OK
    if action == "phi":
        ch = fp.phi(trace_from_json(_load(args), pol))
        r = chn.verify_channel(ch, pol)
        doc = channel_to_json(ch)
        doc["verify"] = report(_channel_checks(r, pol), pol.eps_eq)
        return doc, EXIT_OK if r.passed else EXIT_FAIL
    if action == "correlate":
        k = fp.correlation_matrix(trace_from_json(_load(args), pol))
        return {"n": k.n, "values": complex_array_to_json(k.values)}, EXIT_OK
    if action == "decompose":
        seed = _require(args.seed, "--seed")
        comps = fp.decompose_trace(trace_from_json(_load(args), pol), seed, pol)
        out = []
        for w, c in comps:
            structure = sa.block_structure(fp.generated_image(c, pol), seed, pol)
            out.append({"weight": w, "blocks": [list(b) for b in structure.blocks], "trace": trace_to_json(c)})
        return {"components": out, "seed": seed}, EXIT_OK
    if action == "combine":
        doc = _load(args)
        traces = [trace_from_json(t, pol) for t in _field(doc, "traces")]
        if args.weights:
            coeffs = _float_list(args.weights, "--weights")
        else:
            coeffs = doc.get("coeffs")
        try:
            tr = fp.faithful_combination(traces, pol) if coeffs is None else fp.convex_combine(traces, coeffs, pol)
        except ValueError as exc:
            raise MalformedInput(str(exc)) from exc
        return trace_to_json(tr), EXIT_OK
    if action == "fiber":
        doc = _load(args)
        a, b = trace_from_json(_field(doc, "a"), pol), trace_from_json(_field(doc, "b"), pol)
        ka, kb = fp.correlation_matrix(a).values, fp.correlation_matrix(b).values
        return {"same_fiber": fp.same_phi_fiber(a, b, pol), "residual": max_abs(ka - kb),
                "distance": fp.phi_distance(a, b)}, EXIT_OK
    raise UsageError(f"unknown trace action {action!r}")


# ---------------------------------------------------------------------------
# algebra


def cmd_algebra(args, pol):
    doc = _load(args)
    gens = [matrix_from_json(m) for m in _field(doc, "generators")]
    unital = bool(doc.get("unital", True))
    try:
        alg = sa.generated_algebra(gens, unital, pol, ambient_dim=doc.get("dim"))
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    if args.action == "span":
        return {"dim": alg.dim, "contains_unit": alg.contains_unit,
                "basis": [matrix_to_json(b) for b in alg.basis]}, EXIT_OK
    if args.action == "commutant":
        com = sa.commutant(alg, pol)
        return {"dim": com.dim, "basis": [matrix_to_json(b) for b in com.basis]}, EXIT_OK
    if args.action == "blocks":
        seed = _require(args.seed, "--seed")
        try:
            bs = sa.block_structure(alg, seed, pol)
        except ValueError as exc:
            raise MalformedInput(str(exc)) from exc
        return {"blocks": [list(b) for b in bs.blocks],
                "central_projections": [matrix_to_json(p) for p in bs.central_projections],
                "seed": seed}, EXIT_OK
    raise UsageError(f"unknown algebra action {args.action!r}")


COMMANDS = {
    "units": (cmd_units, ["standard", "random", "from-unitaries", "validate", "intertwine"]),
    "channel": (cmd_channel, ["choi", "apply", "verify", "from-ancilla", "distance"]),
    "trace": (cmd_trace, ["gen", "phi", "correlate", "decompose", "combine", "fiber"]),
    "algebra": (cmd_algebra, ["span", "commutant", "blocks"]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="factorizable", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    for group, (_, actions) in COMMANDS.items():
        p = sub.add_parser(group)
        p.add_argument("action", choices=actions)
        p.add_argument("--in", dest="input", help="input JSON file ('-' or omitted: stdin)")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--blocks", help="comma-separated block dimensions")
        p.add_argument("--weights", help="comma-separated weights or coefficients")
        p.add_argument("--seed", type=int)
        p.add_argument("--eps", type=float, help="uniform tolerance for all checks")
        if group == "channel":
            p.add_argument("--map", help="named map for 'choi': " + ", ".join(NAMED_MAPS))
    return parser


def dispatch(argv: Sequence[str]) -> tuple[int, dict]:
    """Run one command; returns ``(exit_code, document)`` without printing."""
    try:
        args = build_parser().parse_args(list(argv))
        pol = _policy(args)
        handler, _ = COMMANDS[args.group]
        doc, code = handler(args, pol)
    except (UsageError, MalformedInput) as exc:
        return EXIT_MALFORMED, {"error": str(exc)}
    except ValueError as exc:
        # contract violations in the library (non-unitary input, bad dimensions, ...)
        return EXIT_MALFORMED, {"error": str(exc)}
    doc["_out"] = args.out
    return code, doc


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, doc = dispatch(sys.argv[1:] if argv is None else argv)
    out = doc.pop("_out", None)
    text = dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_MALFORMED:
        print(f"error: {doc.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
