"""Command-line front end.

Every verb prints one JSON object.  Exit status is 0 on success, 1 when a
mathematical check fails (``check --strict``, a failing ``verify`` suite) and
2 on malformed input or a violated precondition.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from . import darboux as D
from . import invariants as I
from .expr import ExprError
from .lpdo import LPDO, compose
from .parser import ParseError, parse, parse_operator
from .verify import SUITES, UnknownSuite, verify


class InputError(ValueError):
    pass


def _text(value: str) -> str:
    """Argument text; ``@path`` reads the value from a file."""
    if value.startswith("@"):
        try:
            with open(value[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise InputError(f"cannot read {value[1:]}: {exc.strerror}") from None
    return value


def _expr(value: str):
    return parse(_text(value))


def _operator(value: str) -> LPDO:
    return parse_operator(_text(value))


def _L(value: str) -> D.HyperbolicL:
    return D.HyperbolicL.from_lpdo(_operator(value))


def _M(value: str) -> D.FirstOrderM:
    # a Dx coefficient other than one is divided out on the left
    return D.FirstOrderM.from_lpdo(_operator(value), rescale=True)


def _operator_json(op: LPDO) -> dict:
    return {"operator": str(op), "terms": op.to_terms()}


# --------------------------------------------------------------------------
# verbs; each returns (payload, exit status)


def cmd_compose(args):
    ops = [_operator(t) for t in args.operators]
    result = ops[0]
    for op in ops[1:]:
        result = compose(result, op)
    return _operator_json(result), 0


def cmd_darboux11(args):
    L = _L(args.L)
    M = D.darboux11(L, _expr(args.psi1), _expr(args.psi2))
    w = D.solve_intertwining(L, M)
    return {"M": M.to_json(), "witness": w.to_json()}, 0


def cmd_wronskian(args):
    L = _L(args.L)
    psis = [_expr(p) for p in args.psi]
    return _operator_json(D.wronskian_mn(L, psis, args.m, args.n)), 0


def cmd_check(args):
    L, M = _L(args.L), _M(args.M)
    conditions = D.existence_conditions(L, M)
    exists = all(c.is_zero() for c in conditions)
    payload = {"exists": exists, "conditions": [str(c) for c in conditions]}
    return payload, 1 if args.strict and not exists else 0


def cmd_invariants(args):
    L, M = _L(args.L), _M(args.M)
    if args.evolution:
        return I.evolution_invariants(L, M).to_json(), 0
    return I.gauge_invariants(L, M).to_json(), 0


def cmd_evolve(args):
    L, M = _L(args.L), _M(args.M)
    L1, M1 = I.gauged_evolution(L, M, _expr(args.alpha), _expr(args.beta))
    return {"L": L1.to_json(), "M": M1.to_json()}, 0


def cmd_reconstruct(args):
    if args.L or args.M:
        if not (args.L and args.M):
            raise InputError("--L and --M must be given together")
        targets = I.gauge_invariants(_L(args.L), _M(args.M))
    else:
        missing = [k for k in ("q", "m", "h", "R") if getattr(args, k) is None]
        if missing:
            raise InputError("give either --L/--M or all of --q --m --h --R")
        targets = I.GaugeInvariants(*(_expr(getattr(args, k)) for k in ("q", "m", "h", "R")))
    L, M = D.reconstruct_pair(targets, _expr(args.z), _expr(args.z1))
    return {"L": L.to_json(), "M": M.to_json(), "invariants": I.gauge_invariants(L, M).to_json()}, 0


def cmd_verify(args):
    report = verify(args.suite, args.seed)
    return report.to_json(), 0 if report.passed else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.set_defaults(pretty=False)

    parser = argparse.ArgumentParser(
        prog="darbouxkit",
        description="Darboux transformations of Dx*Dy + a*Dx + b*Dy + c.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = verb("compose", cmd_compose, "compose operators left to right")
    p.add_argument("operators", nargs="+", metavar="OP")

    p = verb("darboux11", cmd_darboux11, "bi-degree (1,1) Wronskian transformation")
    p.add_argument("--L", required=True)
    p.add_argument("--psi1", required=True)
    p.add_argument("--psi2", required=True)

    p = verb("wronskian", cmd_wronskian, "Wronskian operator W_{m,n}")
    p.add_argument("--L", required=True)
    p.add_argument("--psi", action="append", default=[], help="kernel element (repeatable)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = verb("check", cmd_check, "existence conditions for (L, M)")
    p.add_argument("--L", required=True)
    p.add_argument("--M", required=True)
    p.add_argument("--strict", action="store_true", help="exit 1 when no transformation exists")

    p = verb("invariants", cmd_invariants, "gauge or evolution invariants of (L, M)")
    p.add_argument("--L", required=True)
    p.add_argument("--M", required=True)
    p.add_argument("--evolution", action="store_true")

    p = verb("evolve", cmd_evolve, "gauged evolution of (L, M) by alpha, beta")
    p.add_argument("--L", required=True)
    p.add_argument("--M", required=True)
    p.add_argument("--alpha", default="0")
    p.add_argument("--beta", default="0")

    p = verb("reconstruct", cmd_reconstruct, "Wronskian-built pair with given gauge invariants")
    p.add_argument("--L")
    p.add_argument("--M")
    for name in ("q", "m", "h", "R"):
        p.add_argument(f"--{name}")
    p.add_argument("--z", required=True)
    p.add_argument("--z1", required=True)

    p = verb("verify", cmd_verify, "run a verification suite")
    p.add_argument("suite", metavar="SUITE", help=", ".join(SUITES))
    return parser


def _error(kind: str, message: str, position: Optional[int] = None) -> dict:
    err = {"type": kind, "message": message}
    if position is not None:
        err["position"] = position
    return {"error": err}


def _dump(payload: dict, pretty: bool) -> str:
    if pretty:
        return json.dumps(payload, indent=2)
    return json.dumps(payload, separators=(",", ":"))


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        payload, status = args.func(args)
    except ParseError as exc:
        payload, status = _error("ParseError", exc.message, exc.position), 2
    except UnknownSuite as exc:
        payload, status = _error("UnknownSuite", exc.args[0]), 2
    except (D.DarbouxError, ExprError, InputError, ZeroDivisionError) as exc:
        payload, status = _error(type(exc).__name__, str(exc)), 2
    print(_dump(payload, args.pretty), file=out)
    return status


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


__all__ = ["run", "main", "build_parser"]
