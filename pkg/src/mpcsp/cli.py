"""Command-line interface: ``mpcsp <command> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .genealogy import dump_genealogy, initial_pool
from .harness import METHODS, clamp_sigma, rows_to_csv, run_experiment, run_method, sweep, sweep_grid
from .instance import GenConfig, InstanceParseError, generate_instance, load_instance, serialize_instance, \
    validate_instance
from .matheuristic import TrainingConfig, delta_keys
from .model import SubproblemState, build_flook_subproblem, build_full_model, build_myopic_subproblem
from .oracle import validate_plan
from .solver import SolverConfig, export_lp


def _pair(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(",")
    return int(lo), int(hi or lo)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _add_solver_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--backend", choices=("builtin", "highs", "external"), default="builtin",
                    help="MILP backend for model solves (default: builtin branch-and-bound)")
    ap.add_argument("--command", help="external solver command template with {lp} and {sol}")
    ap.add_argument("--time-limit", type=float, help="seconds per MILP solve")


def _add_training_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--delta-ini", type=float, default=0.9)
    ap.add_argument("--sigma", type=float, default=0.9)
    ap.add_argument("--eps", type=float, default=0.01)
    ap.add_argument("--max-cycles", type=int, default=100)


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(args.backend, time_limit=args.time_limit, command=args.command)


def _train_cfg(args) -> TrainingConfig:
    return TrainingConfig(args.delta_ini, clamp_sigma(args.sigma), args.eps, args.max_cycles)


def _load(path: str, xi: int | None):
    inst = load_instance(path)
    return inst if xi is None else inst.with_xi(xi)


def cmd_generate(args) -> int:
    cfg = GenConfig(periods=args.periods, xi=args.xi if args.xi is not None else 1, objects=args.objects,
                    object_dims=args.object_dims, items=args.items, item_dims=args.item_dims,
                    catalogue=args.catalogue, unit_cost=args.unit_cost, seed=args.seed)
    text = serialize_instance(generate_instance(cfg))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    issues = validate_instance(_load(args.instance, args.xi))
    for issue in issues:
        print(issue)
    if not issues:
        print("ok")
    return 1 if any(i.severity == "error" for i in issues) else 0


def _print_plan(plan, info) -> None:
    print(f"cost {plan.cost}")
    print(f"leftover_value {plan.leftover_value}")
    print(f"objective {plan.objective}")
    final = [o for o in plan.pools[-1].objects if not o.is_purchasable and not o.is_empty]
    dims = ", ".join(f"{o.width:g}x{o.height:g}" for o in final) or "none"
    print(f"final_leftovers {dims}")
    for key in ("cycles", "stop_reason", "nodes"):
        if key in info:
            print(f"{key} {info[key]}")


def cmd_solve(args) -> int:
    inst = _load(args.instance, args.xi)
    plan, info = run_method(inst, args.method, _train_cfg(args), _solver_cfg(args))
    if plan is None:
        where = f" at instant {info['failed_at']}" if "failed_at" in info else ""
        print(f"{args.method}: {info.get('status', 'infeasible')}{where}")
        return 2
    print(f"method {args.method}")
    _print_plan(plan, info)
    if args.dump_genealogy:
        print(dump_genealogy(plan.pools, inst.catalogue))
    if args.out:
        Path(args.out).write_text(rows_to_csv([plan.summary()]))
    if args.trace and "trace" in info:
        Path(args.trace).write_text(info["trace"].to_csv())
    return 0


def cmd_verify(args) -> int:
    inst = _load(args.instance, args.xi)
    plan, info = run_method(inst, args.method, _train_cfg(args), _solver_cfg(args))
    if plan is None:
        print(f"{args.method}: no plan ({info.get('status')})")
        return 2
    violations = validate_plan(inst, plan)
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s) in {args.method} plan (cost {plan.cost}, "
          f"leftover value {plan.leftover_value})")
    return 1 if violations else 0


def cmd_export_lp(args) -> int:
    inst = _load(args.instance, args.xi)
    if args.model == "full":
        ms = build_full_model(inst)
    else:
        st = SubproblemState.at(inst, initial_pool(inst))
        if args.model == "myopic":
            ms = build_myopic_subproblem(st)
        else:
            ms = build_flook_subproblem(st, {k: args.delta_ini for k in delta_keys(inst)})
    text = export_lp(ms)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _instances(paths, xi):
    return [(Path(p).stem, _load(p, xi)) for p in paths]


def cmd_compare(args) -> int:
    report = run_experiment(_instances(args.instances, args.xi), args.methods, _train_cfg(args),
                            _solver_cfg(args), args.workers)
    sys.stdout.write(report.to_text())
    if args.out:
        Path(args.out).write_text(report.to_csv())
    return 0


def cmd_sweep(args) -> int:
    rows = sweep(_instances(args.instances, args.xi), args.deltas, args.sigmas, args.reference, args.eps,
                 _solver_cfg(args), args.workers)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpcsp", description="Multi-period 2D cutting with usable leftovers")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--periods", type=int, default=4)
    g.add_argument("--xi", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--objects", type=_pair, default=(1, 5), metavar="LO,HI")
    g.add_argument("--object-dims", type=_pair, default=(30, 100), metavar="LO,HI")
    g.add_argument("--items", type=_pair, default=(2, 15), metavar="LO,HI")
    g.add_argument("--item-dims", type=_pair, default=(5, 20), metavar="LO,HI")
    g.add_argument("--catalogue", type=_pair, default=(1, 5), metavar="LO,HI")
    g.add_argument("--unit-cost", type=_pair, default=(1, 1), metavar="LO,HI")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("instance")
    v.add_argument("--xi", type=int)
    v.set_defaults(func=cmd_validate)

    for name, func, hlp in (("solve", cmd_solve, "solve an instance"),
                            ("verify", cmd_verify, "solve and check the plan with the validator")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("instance")
        s.add_argument("--method", choices=METHODS, default="flook")
        s.add_argument("--xi", type=int)
        _add_solver_args(s)
        _add_training_args(s)
        if name == "solve":
            s.add_argument("--out", help="summary CSV")
            s.add_argument("--trace", help="training trace CSV (flook)")
            s.add_argument("--dump-genealogy", action="store_true", help="print the realized object pools")
        s.set_defaults(func=func)

    e = sub.add_parser("export-lp", help="write a model in LP format")
    e.add_argument("instance")
    e.add_argument("--model", choices=("full", "myopic", "flook"), default="full",
                   help="full model, or the first-instant subproblem")
    e.add_argument("--xi", type=int)
    e.add_argument("--delta-ini", type=float, default=0.9)
    e.add_argument("--out")
    e.set_defaults(func=cmd_export_lp)

    c = sub.add_parser("compare", help="run methods over instances and tabulate")
    c.add_argument("instances", nargs="*")
    c.add_argument("--methods", nargs="+", choices=METHODS, default=["myopic", "flook"])
    c.add_argument("--xi", type=int)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", help="CSV report")
    _add_solver_args(c)
    _add_training_args(c)
    c.set_defaults(func=cmd_compare)

    w = sub.add_parser("sweep", help="grid over delta-ini and sigma")
    w.add_argument("instances", nargs="*")
    w.add_argument("--deltas", type=_floats, default=sweep_grid())
    w.add_argument("--sigmas", type=_floats, default=sweep_grid(), help="1.0 is clamped to 0.999")
    w.add_argument("--reference", choices=METHODS, default="oracle")
    w.add_argument("--eps", type=float, default=0.01)
    w.add_argument("--xi", type=int)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--out")
    _add_solver_args(w)
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceParseError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
