"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 size guard exceeded, 3 a proven
property failed on a concrete computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from .analysis import gap_report, sweep
from .core import (
    GuardError,
    InvariantViolation,
    ValidationError,
    dump_instance,
    encode_scalar,
    format_set,
    load_instance,
    loads_json,
    parse_set,
)
from .equilibrium import AnonymousContract, best_response_dynamics, enumerate_pne, is_pne
from .generators import FAMILIES, FamilySpec, build_family
from .llopt import optimal_ll_anonymous, optimal_ll_for_set
from .noll import full_extraction, log_contract
from .uniform import solve_uniform

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _instance(args):
    if not args.inp:
        raise ValidationError("--in is required")
    return load_instance(_read(args.inp), exact=args.mode == "exact")


def _contract(args, exact: bool) -> AnonymousContract:
    if not args.contract:
        raise ValidationError("--contract is required")
    text = _read(args.contract) if os.path.exists(args.contract) else args.contract
    obj = loads_json(text)
    if isinstance(obj, list):
        obj = {"w": obj}
    return AnonymousContract.from_obj(obj, exact=exact)


def _agent_set(text: Optional[str], n: int) -> Optional[frozenset]:
    if text is None:
        return None
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        ids = [int(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"--set must be comma-separated agent ids, got {text!r}") from exc
    return parse_set(ids, n)


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        for piece in item.split() if " " in item else [item]:
            if "=" not in piece:
                raise ValidationError(f"parameter {piece!r} is not key=value")
            k, v = piece.split("=", 1)
            out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_instance(args) -> str:
    if not args.family:
        raise ValidationError("--family is required")
    params = _params(args.params)
    if args.family == "random":
        if args.seed is None and "seed" not in params:
            raise ValidationError("the random family needs --seed")
        if args.seed is not None:
            params["seed"] = str(args.seed)
        params.setdefault("exact", "true" if args.mode == "exact" else "false")
    gen = build_family(FamilySpec(args.family, params))
    inst = gen.instance.with_mode(args.mode == "exact") if args.family != "random" else gen.instance
    meta = dict(gen.meta)
    if gen.contract is not None:
        meta["contract"] = gen.contract.to_json()["w"]
    if gen.target_set is not None:
        meta["target_set"] = format_set(gen.target_set)
    return dump_instance(inst, meta)


def cmd_solve_uniform(args) -> str:
    return _json(solve_uniform(_instance(args)).to_json())


def cmd_solve_ll(args) -> str:
    inst = _instance(args)
    S = _agent_set(args.set, inst.n)
    if S is not None:
        res = optimal_ll_for_set(inst, S)
        obj = {"set": format_set(S), "status": res.status}
        if res.status == "optimal":
            obj.update(w=res.w.to_json()["w"], utility=encode_scalar(res.utility))
        return _json(obj)
    sol = optimal_ll_anonymous(inst)
    if args.csv:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["set", "status", "utility", "w"], lineterminator="\n")
        writer.writeheader()
        for r in sol.per_set:
            writer.writerow(r.to_row())
        _emit(buf.getvalue(), args.csv)
    return _json(sol.to_json())


def cmd_solve_noll(args) -> str:
    return _json(log_contract(_instance(args)).to_json())


def cmd_full_extract(args) -> str:
    return _json(full_extraction(_instance(args)).to_json())


def cmd_enumerate_pne(args) -> str:
    inst = _instance(args)
    w = _contract(args, inst.exact)
    S = _agent_set(args.set, inst.n)
    if S is not None:
        return _json(is_pne(inst, w, S).to_json())
    return _json({"equilibria": [r.to_json() for r in enumerate_pne(inst, w)]})


def cmd_dynamics(args) -> str:
    inst = _instance(args)
    w = _contract(args, inst.exact)
    S0 = _agent_set(args.set, inst.n) or frozenset()
    if args.policy == "random" and args.seed is None:
        raise ValidationError("the random policy needs --seed")
    trace = best_response_dynamics(inst, w, S0, policy=args.policy, rng=args.seed)
    final = is_pne(inst, w, trace[-1])
    return _json({"trace": [format_set(s) for s in trace], "steps": len(trace) - 1, "final": final.to_json()})


def cmd_gap_report(args) -> str:
    rep = gap_report(_instance(args), delta=args.delta, alpha=args.alpha)
    return _json(rep.to_json())


def cmd_sweep(args) -> str:
    if not args.family:
        raise ValidationError("--family is required")
    if args.grid:
        grid = loads_json(_read(args.grid))
        if not isinstance(grid, (list, dict)):
            raise ValidationError("grid file must hold a list of parameter objects or an object of lists")
        if isinstance(grid, dict):
            grid = {k: v if isinstance(v, list) else [v] for k, v in grid.items()}
    else:
        grid = {k: v.split(",") for k, v in _params(args.params).items()}
    if args.family == "random" and args.seed is not None:
        if isinstance(grid, dict):
            grid.setdefault("seed", [str(args.seed)])
        else:
            grid = [dict(g, seed=g.get("seed", args.seed)) for g in grid]
    return sweep(args.family, grid, delta=args.delta, alpha=args.alpha)


COMMANDS = {
    "gen-instance": (cmd_gen_instance, "build an instance from a named family"),
    "solve-uniform": (cmd_solve_uniform, "optimal uniform contract"),
    "solve-ll": (cmd_solve_ll, "optimal limited-liability anonymous contract (n <= 12)"),
    "solve-noll": (cmd_solve_noll, "top-k contract without limited liability"),
    "full-extract": (cmd_full_extract, "full-extraction contract without limited liability"),
    "enumerate-pne": (cmd_enumerate_pne, "all pure equilibria of a contract"),
    "dynamics": (cmd_dynamics, "best-response dynamics from a starting set"),
    "gap-report": (cmd_gap_report, "compare contract classes on one instance"),
    "sweep": (cmd_sweep, "gap reports over a family grid, as CSV"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anoncontract", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--in", dest="inp", help="instance JSON file")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--seed", type=int)
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--params", nargs="*", default=[], metavar="K=V")
        p.add_argument("--contract", help="contract JSON file or inline JSON")
        p.add_argument("--set", help="comma-separated 1-based agent ids")
        p.add_argument("--policy", choices=("lowest", "random"), default="lowest")
        p.add_argument("--delta", default="0.5")
        p.add_argument("--alpha")
        if name == "solve-ll":
            p.add_argument("--csv", help="write the per-set status table here")
        if name == "sweep":
            p.add_argument("--grid", help="JSON grid file")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        func = COMMANDS[args.command][0]
        _emit(func(args), args.out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main() -> None:
    sys.exit(run())
