"""
Command-line interface: ``run``, ``fixpoint``, ``check``, ``repl`` and ``presets``.
"""

import argparse
import sys
import time
from typing import Any, Callable, Dict, Optional, Sequence, TextIO

from src.core.loader import load_file, prepare_constraints, prepare_goal
from src.core.parser import parse_constraints, parse_goal
from src.core.proof import check_proof, sqda_count
from src.core.semantics import GroundScope, lfp_bounded
from src.core.serialization import dumps, load_proofs, qc_atom_to_dict, solution_to_dict
from src.core.solver import SearchOptions, solve
from src.models.constants import APP_NAME, EXIT_DIAGNOSTICS, EXIT_NO_SOLUTION, EXIT_OK, VERSION
from src.models.errors import DiagnosticError, SqclpError
from src.models.presets import PRESETS, fits, program_traits
from src.utilities.logger import AppLogger
from src.utilities.settings import LOG_LEVELS, load_settings, log_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Qualified constraint logic programming with proximity relations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--log-level", choices=LOG_LEVELS, type=str.upper, help="logging level")
    parser.add_argument("--log-file", help="write JSON log records to this file")
    parser.add_argument("--settings", help="settings file (default: $SQCLP_HOME/settings.json)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="solve a goal")
    run.add_argument("file", help="program file")
    run.add_argument("--goal", required=True, help='goal, e.g. "?- p(X)#W | W >= 0.5"')
    run.add_argument("--depth", type=int, help="clause applications allowed per goal atom")
    run.add_argument("--limit", type=int, help="maximum number of answers")
    run.add_argument("--collect-pi", action="store_true", help="add body constraints to the answer")
    run.add_argument("--preset", help="scheme instance the program must belong to")
    run.add_argument("--json", action="store_true", help="print answers as JSON")
    run.add_argument("--verbose", action="store_true", help="describe the program before answering")

    fixpoint = commands.add_parser("fixpoint", help="iterate the immediate consequence operator")
    fixpoint.add_argument("file", help="program file")
    fixpoint.add_argument("--universe-depth", type=int, help="constructor nesting of the ground terms")
    fixpoint.add_argument("--iters", type=int, help="maximum number of iterations")
    fixpoint.add_argument("--pi", default="", help="constraint set of the scope")
    fixpoint.add_argument("--workers", type=int, help="threads evaluating clauses")
    fixpoint.add_argument("--preset", help="scheme instance the program must belong to")
    fixpoint.add_argument("--json", action="store_true", help="print the trace as JSON")

    check = commands.add_parser("check", help="validate proof trees")
    check.add_argument("file", help="program file")
    check.add_argument("proof", help="JSON file with proof trees or answers")
    check.add_argument("--preset", help="scheme instance the program must belong to")

    repl = commands.add_parser("repl", help="interactive goal solving")
    repl.add_argument("file", help="program file")
    repl.add_argument("--depth", type=int, help="clause applications allowed per goal atom")
    repl.add_argument("--preset", help="scheme instance the program must belong to")

    presets = commands.add_parser("presets", help="list the scheme instances")
    presets.add_argument("file", nargs="?", help="report which instances this program belongs to")
    return parser


def _pick(value: Optional[Any], default: Any) -> Any:
    return default if value is None else value


def _run(args, settings, out: TextIO, err: TextIO) -> int:
    program = load_file(args.file, args.preset)
    goal = prepare_goal(program, parse_goal(args.goal))
    if args.verbose:
        traits = program_traits(program)
        print(f"% scheme SQCLP(R, {program.qdom}, {program.cdom}), {len(program.clauses)} clauses", file=err)
        print(f"% threshold-free: {traits.threshold_free}, attenuation-free: {traits.attenuation_free}, "
              f"constraint-free: {traits.constraint_free}, "
              f"similarity relation: {program.proximity.is_similarity()}", file=err)
    options = SearchOptions(depth=_pick(args.depth, settings["depth"]),
                            limit=_pick(args.limit, settings["limit"]),
                            collect=args.collect_pi)
    solutions = list(solve(program, goal, options))
    if args.json:
        print(dumps([solution_to_dict(s) for s in solutions]), file=out)
    elif solutions:
        for solution in solutions:
            print(solution, file=out)
    else:
        print("no", file=out)
    return EXIT_OK if solutions else EXIT_NO_SOLUTION


def _fixpoint(args, settings, out: TextIO, err: TextIO) -> int:
    program = load_file(args.file, args.preset)
    constraints = prepare_constraints(program, parse_constraints(args.pi))
    scope = GroundScope.from_program(program, _pick(args.universe_depth, settings["universe_depth"]),
                                     (constraints,))
    result = lfp_bounded(program, scope, _pick(args.iters, settings["iterations"]),
                         _pick(args.workers, settings["workers"]))
    if args.json:
        print(dumps({
            "converged": result.converged,
            "iterations": result.iterations,
            "trace": [[qc_atom_to_dict(phi) for phi in step] for step in result.trace],
            "model": [qc_atom_to_dict(phi) for phi in result.interpretation.generators()],
        }), file=out)
        return EXIT_OK
    for index, step in enumerate(result.trace, 1):
        print(f"iteration {index}:", file=out)
        for phi in step:
            print(f"  {phi}", file=out)
    if result.converged:
        print(f"fixpoint reached after {result.iterations} iterations", file=out)
    else:
        print(f"no fixpoint within {result.iterations} iterations", file=out)
    return EXIT_OK


def _check(args, settings, out: TextIO, err: TextIO) -> int:
    program = load_file(args.file, args.preset)
    with open(args.proof, "r", encoding="utf-8") as f:
        trees = load_proofs(program, f.read())
    failures = 0
    for index, tree in enumerate(trees, 1):
        result = check_proof(program, tree)
        if result.ok:
            print(f"proof {index}: valid, {sqda_count(tree)} SQDA steps", file=out)
            continue
        failures += 1
        print(f"proof {index}: invalid", file=out)
        for diagnostic in result.diagnostics:
            print(f"{args.proof}: {diagnostic}", file=err)
    return EXIT_DIAGNOSTICS if failures else EXIT_OK


def _repl(args, settings, out: TextIO, err: TextIO) -> int:
    from src.ui.repl import ReplShell

    shell = ReplShell(args.file, depth=_pick(args.depth, settings["depth"]), limit=settings["limit"],
                      preset=args.preset, stdout=out)
    shell.cmdloop()
    return EXIT_OK


def _presets(args, settings, out: TextIO, err: TextIO) -> int:
    program = load_file(args.file) if args.file else None
    for preset in PRESETS.values():
        line = f"{preset.name:<6} {preset.parameters:<24} {preset.description}"
        if program is not None:
            line = ("* " if fits(preset, program) else "  ") + line
        print(line, file=out)
    if program is not None:
        traits = program_traits(program)
        print(f"threshold-free: {traits.threshold_free}", file=out)
        print(f"attenuation-free: {traits.attenuation_free}", file=out)
        print(f"constraint-free: {traits.constraint_free}", file=out)
        print(f"similarity relation: {program.proximity.is_similarity()}", file=out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[..., int]] = {
    "run": _run,
    "fixpoint": _fixpoint,
    "check": _check,
    "repl": _repl,
    "presets": _presets,
}


def _report(exc: Exception, err: TextIO) -> None:
    if isinstance(exc, DiagnosticError):
        print(f"error: {exc.message}", file=err)
        for diagnostic in exc.diagnostics:
            print(f"  {diagnostic}", file=err)
    else:
        print(f"error: {exc}", file=err)


def cli_main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
             err: Optional[TextIO] = None) -> int:
    """Run one subcommand and return its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    settings = load_settings(args.settings)
    log_file = args.log_file or (log_path() if settings["log_to_file"] else None)
    AppLogger.configure(log_file, args.log_level or settings["log_level"])
    logger = AppLogger()
    logger.usage(args.command, {"file": getattr(args, "file", None)})

    started = time.perf_counter()
    try:
        return COMMANDS[args.command](args, settings, out, err)
    except SqclpError as exc:
        logger.info("Command failed", extra_context={"command": args.command, "error": str(exc)})
        _report(exc, err)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        logger.error(f"Cannot read input: {exc}", exc_info=True)
        print(f"error: {exc}", file=err)
        return EXIT_DIAGNOSTICS
    finally:
        logger.performance(f"cli.{args.command}", (time.perf_counter() - started) * 1000)
