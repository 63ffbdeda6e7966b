"""Command line interface.

Exit codes: 0 success (query answered true), 1 query answered false,
2 inconsistent domain, 3 usage, parse or validation errors, 4 budget
exhausted, 5 internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import load_spec, run_experiment
from .grounding import GroundingError, ground, report_stats, dump_ground
from .model import DomainDescription, errors_of, validate
from .parser import ParseError, parse_domain, parse_query
from .query import BudgetExceeded, answer_theory, check_consistency, required_horizon
from .sat import FragmentError, answer_sat, check_fragment, compile_theory, to_dimacs
from .specfiles import SpecError

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INCONSISTENT = 2
EXIT_USAGE = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; keep 2 for inconsistency
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_files(paths: list[str]) -> DomainDescription:
    domain: DomainDescription | None = None
    for raw in paths:
        path = Path(raw)
        text = path.read_text()
        base = domain.signature if domain is not None else None
        unit = parse_domain(text, file=str(path), base_signature=base)
        if domain is None:
            domain = unit.domain
        else:
            domain.propositions.extend(unit.domain.propositions)
    assert domain is not None
    return domain


def _fail(message: str, code: int) -> int:
    print("error: %s" % message, file=sys.stderr)
    return code


def cmd_check(args) -> int:
    try:
        domain = _load_files(args.files)
    except (ParseError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    diagnostics = validate(domain)
    for diag in diagnostics:
        print("%s %s: %s" % (diag.severity, diag.code, diag.message))
    if errors_of(diagnostics):
        return EXIT_USAGE
    try:
        theory = ground(domain, args.horizon)
        consistent, stats = check_consistency(theory, args.budget)
    except GroundingError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except BudgetExceeded:
        return _fail("consistency probe ran out of budget", EXIT_BUDGET)
    print(
        "%s: %d fluent atoms, horizon %d, %s"
        % (
            " ".join(args.files),
            theory.n_fluents,
            theory.horizon,
            "consistent" if consistent else "inconsistent",
        )
    )
    return EXIT_TRUE if consistent else EXIT_INCONSISTENT


def cmd_query(args) -> int:
    try:
        domain = _load_files(args.files)
        if args.query:
            qtext = Path(args.query).read_text()
        else:
            if not args.goal or not args.mode:
                return _fail("--goal requires --mode (or use --query FILE)", EXIT_USAGE)
            qtext = "%s { %s }" % (args.mode, args.goal)
            if args.horizon is not None:
                qtext += " horizon %d" % args.horizon
        query = parse_query(qtext, domain.signature)
        if args.horizon is not None and query.horizon is None:
            query = type(query)(query.mode, query.goals, args.horizon)
        theory = ground(domain, required_horizon(domain, query))
    except (ParseError, GroundingError, OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        if args.backend == "sat":
            result = answer_sat(theory, query, budget=args.budget)
        else:
            result = answer_theory(
                theory, query, budget=args.budget, use_slice=args.slice == "on"
            )
    except FragmentError as exc:
        return _fail("outside the clausal fragment: %s" % exc, EXIT_USAGE)
    except BudgetExceeded as exc:
        return _fail(str(exc), EXIT_BUDGET)
    if args.json:
        print(json.dumps(result.to_record(), sort_keys=True))
    else:
        print(result.answer)
        if args.witness and result.witness is not None:
            for t, state in enumerate(result.witness["states"]):
                print("  state %d: {%s}" % (t, ", ".join(state)))
            for t, acts in enumerate(result.witness["actions"]):
                if acts:
                    print("  actions %d: %s" % (t, ", ".join(acts)))
    if result.answer == "true":
        return EXIT_TRUE
    if result.answer == "false":
        return EXIT_FALSE
    return EXIT_INCONSISTENT


def cmd_ground(args) -> int:
    try:
        domain = _load_files(args.files)
        theory = ground(domain, args.horizon)
    except (ParseError, GroundingError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    if args.dimacs:
        report = check_fragment(theory)
        if not report.accepted:
            return _fail(
                "outside the clausal fragment: %s" % "; ".join(v.detail for v in report.violations),
                EXIT_USAGE,
            )
        inst = compile_theory(theory)
        Path(args.dimacs).write_text(to_dimacs(inst, include_names=True))
        print("wrote %s (%d vars, %d clauses)" % (args.dimacs, inst.num_vars, len(inst.clauses)))
    if args.stats:
        print(report_stats(theory))
    if args.dump:
        print(dump_ground(theory))
    if not (args.stats or args.dump or args.dimacs):
        print(report_stats(theory))
    return EXIT_TRUE


def cmd_bench(args) -> int:
    try:
        spec = load_spec(args.specfile)
        if args.repeats is not None:
            spec.repeats = args.repeats
        table = run_experiment(spec)
    except (SpecError, ParseError, GroundingError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    except BudgetExceeded as exc:
        return _fail(str(exc), EXIT_BUDGET)
    paths = table.write(args.out)
    print("wrote %s" % " and ".join(str(p) for p in paths))
    return EXIT_TRUE


def cmd_corpus(args) -> int:
    from . import corpus

    if args.action == "list":
        for path in sorted(corpus.DATA_DIR.iterdir()):
            print(path.name)
        return EXIT_TRUE
    if args.action == "show":
        if not args.name:
            return _fail("corpus show needs a file name", EXIT_USAGE)
        try:
            print(corpus.corpus_path(args.name).read_text(), end="")
        except FileNotFoundError as exc:
            return _fail(str(exc), EXIT_USAGE)
        return EXIT_TRUE
    if args.action == "generate":
        if not args.name:
            return _fail("corpus generate needs VARIANT:POSITIONS", EXIT_USAGE)
        try:
            variant, _, size = args.name.partition(":")
            print(corpus.generate_zoo(variant, int(size or "6")), end="")
        except ValueError as exc:
            return _fail(str(exc), EXIT_USAGE)
        return EXIT_TRUE
    # verify
    try:
        corpus.load_corpus()
        report = corpus.run_golden(budget=args.budget)
    except BudgetExceeded:
        return _fail("golden run exceeded the budget", EXIT_BUDGET)
    print(report.render())
    passed = sum(1 for o in report.outcomes if o.ok)
    print("%d/%d golden cases passed" % (passed, len(report.outcomes)))
    return EXIT_TRUE if report.ok else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elang", description=__doc__)
    parser.add_argument("--version", action="version", version="elang " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse, validate and probe consistency")
    p.add_argument("files", nargs="+")
    p.add_argument("--horizon", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("query", help="answer a credulous or skeptical query")
    p.add_argument("files", nargs="+")
    p.add_argument("--query", help="file holding the query text")
    p.add_argument("--goal", help="inline goal, e.g. 'light holds-at 4'")
    p.add_argument("--mode", choices=["credulous", "skeptical"])
    p.add_argument("--horizon", type=int)
    p.add_argument("--backend", choices=["engine", "sat"], default="engine")
    p.add_argument("--slice", choices=["on", "off"], default="off")
    p.add_argument("--budget", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("ground", help="ground a description and report statistics")
    p.add_argument("files", nargs="+")
    p.add_argument("--horizon", type=int)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--dump", action="store_true")
    p.add_argument("--dimacs", help="also compile and write clauses to this path")
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("bench", help="run an experiment spec")
    p.add_argument("specfile")
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("corpus", help="inspect or verify the bundled corpus")
    p.add_argument(
        "action", choices=["verify", "list", "show", "generate"], default="verify", nargs="?"
    )
    p.add_argument("name", nargs="?")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # surface anything unexpected with a stable code
        print("internal error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
