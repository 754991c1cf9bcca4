"""Command line entry point: ``runwayseq <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys

from .dual import DualOptions, solve_dual
from .harness import (GenSpec, MODES, dump_instance, export_mip, format_grids, gen_instance, load_instance,
                      rows_to_csv, run_bench, verify_tables)
from .oracle import LimitExceeded, oracle_dual, oracle_single
from .separation import Layout, Task, load_model
from .sequence import Infeasible, dump_schedule
from .single import SolverOptions, solve_single


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_mode(inst, mode: str) -> None:
    tasks = {a.task for a in inst.aircraft}
    want = {"landing": {Task.LANDING}, "takeoff": {Task.TAKEOFF}}.get(mode)
    if want is not None and not tasks <= want:
        raise ValueError(f"instance has aircraft outside mode {mode!r}")


def _summary(sol) -> str:
    st = sol.stats
    return (f"makespan={sol.makespan} candidates={st.get('candidates', 0)} "
            f"frontier_max={st.get('frontier_max', 0)}\n")


def cmd_solve_single(args) -> int:
    model = load_model(args.model)
    inst = load_instance(args.instance)
    _check_mode(inst, args.mode)
    opts = SolverOptions(frontier_budget=args.frontier_budget, full_pairs_check=args.full_pairs_check)
    sol = solve_single(inst.aircraft, model, inst.t0, opts, inst.layout)
    _emit(dump_schedule(sol.schedule) + _summary(sol), args.out)
    return 0


def cmd_solve_dual(args) -> int:
    model = load_model(args.model)
    inst = load_instance(args.instance)
    opts = DualOptions(max_block_len=args.max_block_len, max_breakpoints=args.max_breakpoints)
    sol = solve_dual(inst.dual(), model, opts)
    _emit(dump_schedule(sol.schedule) + f"makespan={sol.makespan} optimality={sol.optimality.value}\n", args.out)
    return 0


def cmd_blocks(args) -> int:
    model = load_model(args.model)
    if not args.dump:
        report = verify_tables(model)
        _emit(f"{report.passed}/{len(report.cells)} cells match\n", args.out)
        return 0
    _emit(format_grids(model), args.out)
    return 0


def cmd_oracle(args) -> int:
    model = load_model(args.model)
    inst = load_instance(args.instance)
    try:
        if inst.layout is Layout.DUAL:
            d = inst.dual()
            res = oracle_dual(d.landings, d.takeoffs, model, inst.t0, limit=args.limit)
        else:
            res = oracle_single(inst.aircraft, model, inst.t0, limit=args.limit)
    except LimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(dump_schedule(res.witness) + f"makespan={res.makespan} optimal_orders={res.optimal_orders}\n",
          args.out)
    return 0


def cmd_gen(args) -> int:
    spec = GenSpec(args.count, args.t_e, args.t_w, args.mode, args.seed)
    _emit(dump_instance(gen_instance(spec)), args.out)
    return 0


def cmd_export_mip(args) -> int:
    model = load_model(args.model)
    inst = load_instance(args.instance)
    _emit(export_mip(inst, model, inst.layout), args.out)
    return 0


def cmd_verify_tables(args) -> int:
    report = verify_tables(load_model(args.model))
    _emit("\n".join(report.lines()) + "\n", args.out)
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    rows = run_bench(args.config)
    _emit(rows_to_csv(rows), args.out)
    for r in rows:
        if r.error:
            print(f"{r.id}: {r.error}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="runwayseq", description="Runway sequencing solvers and tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, model=True, instance=False):
        sp = sub.add_parser(name, help=help_text)
        if model:
            sp.add_argument("--model", default="heathrow-recat-single",
                            help="builtin model name or separation file")
        if instance:
            sp.add_argument("--instance", required=True, help="instance file")
        sp.add_argument("--seed", type=int, default=0, help="random seed")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.set_defaults(func=func)
        return sp

    sp = add("solve-single", cmd_solve_single, "solve one runway", instance=True)
    sp.add_argument("--mode", choices=("landing", "takeoff", "mixed"), default="mixed")
    sp.add_argument("--frontier-budget", type=int, default=None)
    sp.add_argument("--full-pairs-check", action="store_true")

    sp = add("solve-dual", cmd_solve_dual, "solve a landing and a takeoff runway", instance=True)
    sp.add_argument("--max-block-len", type=int, default=8)
    sp.add_argument("--max-breakpoints", type=int, default=2)

    sp = add("blocks", cmd_blocks, "block catalog grids")
    sp.add_argument("--dump", action="store_true", help="print every grid")

    sp = add("oracle", cmd_oracle, "exact optimum by enumeration", instance=True)
    sp.add_argument("--limit", type=int, default=9)

    sp = add("gen", cmd_gen, "generate a random instance", model=False)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--t-e", type=int, default=60, help="arrival spread in minutes")
    sp.add_argument("--t-w", type=int, default=30, help="window width in minutes")
    sp.add_argument("--mode", choices=MODES, default="landing")

    add("export-mip", cmd_export_mip, "write the instance as an LP file", instance=True)
    add("verify-tables", cmd_verify_tables, "check block grids against the reference values")

    sp = add("bench", cmd_bench, "run a benchmark config and write CSV", model=False)
    sp.add_argument("--config", required=True, help="JSON benchmark config")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (Infeasible, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
