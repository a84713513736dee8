"""Command-line interface.

Subcommands:

* ``check FORMULA``: parse a formula, print its canonical form, report
  whether the plan search supports it.
* ``plan``: search an accepting timed run for a scenario, write plan JSON.
* ``simulate``: execute a plan through the closed loop, write the trace CSV.
* ``verify``: re-check a trace against its plan and formula, write a report.
* ``run``: plan + simulate + verify in one go.

Exit codes: 0 success, 1 property violation (no plan found, envelope or
containment failure, unsatisfied formula), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    CoopManipError,
    FormulaSyntaxError,
    InvalidConfig,
    NotAdjacent,
    UnsupportedFragment,
)
from .executive import execute_plan, trace_from_csv, verify_trace
from .mitl import parse
from .planner import check_fragment, find_accepting_run, plan_from_json, plan_to_json
from .scenario import load_scenario


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="coopmanip", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p, need_plan=False, need_trace=False):
        p.add_argument("--scenario", required=True, help="scenario file (.toml or .json)")
        p.add_argument("--formula", help="override the scenario formula")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--dt", type=float, help="override the integration step (s)")
        p.add_argument(
            "--paper-faithful-envelopes",
            action="store_true",
            help="use rho0 = tube on position channels instead of tube/sqrt(3)",
        )
        if need_plan:
            p.add_argument("--plan", required=True, help="plan JSON file")
        if need_trace:
            p.add_argument("--trace", required=True, help="trace CSV file")

    p = sub.add_parser("check", help="parse a formula and report fragment support")
    p.add_argument("formula")

    p = sub.add_parser("plan", help="search an accepting timed run")
    add_common(p)
    p.add_argument("--out", default="plan.json")

    p = sub.add_parser("simulate", help="execute a plan")
    add_common(p, need_plan=True)
    p.add_argument("--out", default="trace.csv")
    p.add_argument("--trace-stride", type=int, default=1)
    p.add_argument("--loop-periods", type=int)

    p = sub.add_parser("verify", help="re-check a finished run")
    add_common(p, need_plan=True, need_trace=True)
    p.add_argument("--out", default="report.json")

    p = sub.add_parser("run", help="plan, simulate, and verify")
    add_common(p)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--trace-stride", type=int, default=1)
    p.add_argument("--loop-periods", type=int)

    return top


def _load(args):
    scenario = load_scenario(args.scenario)
    overrides = {}
    if args.formula is not None:
        overrides["formula_text"] = args.formula
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.paper_faithful_envelopes:
        overrides["conservative_envelopes"] = False
    if overrides:
        from dataclasses import replace

        scenario = replace(scenario, **overrides)
    scenario.validate()
    return scenario


def _cmd_check(args) -> int:
    formula = parse(args.formula)
    print(f"parsed: {formula.text()}")
    try:
        check_fragment(formula)
        print("plan search: supported fragment")
    except UnsupportedFragment as exc:
        print(f"plan search: unsupported ({exc})")
    return 0


def _cmd_plan(args) -> int:
    scenario = _load(args)
    plan = find_accepting_run(scenario.wts(), scenario.formula(), scenario.initial_region)
    if plan is None:
        print("no accepting run", file=sys.stderr)
        return 1
    Path(args.out).write_text(plan_to_json(plan))
    print(f"plan with {len(plan.prefix)} prefix events -> {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    scenario = _load(args)
    plan = plan_from_json(Path(args.plan).read_text())
    trace = execute_plan(scenario, plan, args.loop_periods)
    trace.to_csv(args.out, args.trace_stride)
    print(f"{len(trace.t)} steps over {trace.t[-1] - trace.t[0]:g}s -> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    scenario = _load(args)
    plan = plan_from_json(Path(args.plan).read_text())
    trace = trace_from_csv(args.trace, plan, scenario)
    report = verify_trace(trace, plan, scenario)
    Path(args.out).write_text(report.to_json())
    print(f"satisfied={report.satisfied} violations={len(report.violations)} -> {args.out}")
    return 0 if report.ok else 1


def _cmd_run(args) -> int:
    scenario = _load(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan = find_accepting_run(scenario.wts(), scenario.formula(), scenario.initial_region)
    if plan is None:
        print("no accepting run", file=sys.stderr)
        return 1
    (out / "plan.json").write_text(plan_to_json(plan))
    trace = execute_plan(scenario, plan, args.loop_periods)
    trace.to_csv(out / "trace.csv", args.trace_stride)
    report = verify_trace(trace, plan, scenario)
    (out / "report.json").write_text(report.to_json())
    print(
        f"plan events={len(plan.prefix)} trace steps={len(trace.t)} "
        f"satisfied={report.satisfied} violations={len(report.violations)}"
    )
    return 0 if report.ok else 1


_COMMANDS = {
    "check": _cmd_check,
    "plan": _cmd_plan,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "run": _cmd_run,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (FormulaSyntaxError, InvalidConfig, NotAdjacent, UnsupportedFragment) as exc:
        # bad inputs, not runtime property failures
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CoopManipError as exc:
        # envelope/region/finite-state violations during execution
        print(f"violation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
