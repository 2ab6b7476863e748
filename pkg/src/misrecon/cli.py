"""Command-line entry point tying together generation, scheduling, existence
checks, oracle queries, validation and benchmarking.

Exit codes: 0 success, 1 negative analysis/validation result, 2 usage or
input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import (
    brute_force_oracle,
    check_blocker,
    gen_gadget,
    small_diameter_fallback,
)
from .constlength import constant_length_schedule, constant_length_schedule_distributed
from .constrounds import (
    coloring_schedule,
    constant_rounds_schedule,
    parse_coloring_file,
)
from .errors import InputError, InternalError
from .graph import Graph, VertexSet, diameter, format_graph_file, parse_graph_file
from .schedule import (
    PropertySpec,
    ReconfigInstance,
    Schedule,
    format_schedule_file,
    format_vertex_set_file,
    parse_schedule_file,
    parse_vertex_set_file,
    validate,
)
from .sim import format_sim_report

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _default_seed() -> int:
    return int(os.environ.get("MISRECON_SEED", "0"))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_instance(args) -> ReconfigInstance:
    g = parse_graph_file(_read(args.graph))
    alpha = parse_vertex_set_file(_read(args.alpha))
    beta = parse_vertex_set_file(_read(args.beta))
    return ReconfigInstance(g, alpha, beta)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="misrecon",
        description="Schedules, oracles and gadgets for distributed MIS reconfiguration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_flags(p):
        p.add_argument("--graph", required=True)
        p.add_argument("--alpha", required=True)
        p.add_argument("--beta", required=True)

    p = sub.add_parser("const-length", help="28-step schedule (diameter > 3)")
    instance_flags(p)
    p.add_argument("--distributed", action="store_true")
    p.add_argument("--subroutine", choices=["deterministic-id", "luby"], default="deterministic-id")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--round-cap", type=int, default=10_000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("const-rounds", help="identifier- or coloring-slotted schedule (diameter > 5)")
    instance_flags(p)
    p.add_argument("--coloring", help="coloring file; omit to slot by node id")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="exhaustive shortest-schedule search")
    instance_flags(p)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--out", help="write the witness schedule here when one exists")

    p = sub.add_parser("check", help="three-condition existence test")
    instance_flags(p)

    p = sub.add_parser("gen", help="write a gadget-family instance")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("validate", help="check a schedule file against an instance")
    instance_flags(p)
    p.add_argument("--schedule", required=True)
    p.add_argument("--d", type=int, default=4)

    p = sub.add_parser("bench", help="run an algorithm over generated families")
    p.add_argument("--family", required=True)
    p.add_argument("--n", required=True, help="comma-separated sizes, e.g. 20,40,80")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--algo", choices=["const-length", "const-rounds"], required=True)
    p.add_argument("--out", help="write the table here instead of stdout")
    return parser


def dispatch(args: argparse.Namespace) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = _default_seed()

    if args.command == "const-length":
        inst = _load_instance(args)
        if diameter(inst.graph) <= 3:
            sched = small_diameter_fallback(inst)
            if sched is None:
                print("blocked: no schedule exists for this small-diameter instance")
                return EXIT_NEGATIVE
            print("note: diameter <= 3, emitted the small-diameter fallback schedule")
        elif args.distributed:
            mode = "luby" if args.subroutine == "luby" else "deterministic-id"
            sched, report = constant_length_schedule_distributed(
                inst, mode=mode, seed=seed, round_cap=args.round_cap
            )
            sys.stdout.write(format_sim_report(report))
        else:
            mode = "luby" if args.subroutine == "luby" else "deterministic-id"
            sched = constant_length_schedule(inst, mode=mode, seed=seed, round_cap=args.round_cap)
        Path(args.out).write_text(format_schedule_file(sched))
        print(f"schedule_length: {sched.length}")
        return EXIT_OK

    if args.command == "const-rounds":
        inst = _load_instance(args)
        if args.coloring:
            coloring = parse_coloring_file(_read(args.coloring))
            sched = coloring_schedule(inst, coloring)
        else:
            sched, report = constant_rounds_schedule(inst)
            sys.stdout.write(format_sim_report(report))
        Path(args.out).write_text(format_schedule_file(sched))
        print(f"schedule_length: {sched.length}")
        return EXIT_OK

    if args.command == "oracle":
        inst = _load_instance(args)
        result = brute_force_oracle(inst, PropertySpec(args.d), cap_states=args.cap)
        print(f"exists: {'inconclusive' if result.exists is None else str(result.exists).lower()}")
        if result.min_length is not None:
            print(f"min_length: {result.min_length}")
        print(f"states_explored: {result.states_explored}")
        if result.witness is not None and args.out:
            Path(args.out).write_text(format_schedule_file(result.witness))
        return EXIT_OK if result.exists else EXIT_NEGATIVE

    if args.command == "check":
        inst = _load_instance(args)
        report = check_blocker(inst)
        print(f"blocked: {str(report.blocked).lower()}")
        print(f"cond1_fully_connected: {str(report.cond1_fully_connected).lower()}")
        print(f"cond2_eps_covered: {str(report.cond2_eps_covered).lower()}")
        print(f"cond3_no_complement_path: {str(report.cond3_no_complement_path).lower()}")
        if report.witness is not None:
            print(f"witness: {report.witness}")
        return EXIT_NEGATIVE if report.blocked else EXIT_OK

    if args.command == "gen":
        inst = gen_gadget(args.family, n=args.n, k=args.k, p=args.p, seed=seed)
        prefix = Path(args.out_prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        paths = {
            "graph": prefix.with_suffix(".graph"),
            "alpha": prefix.with_suffix(".alpha"),
            "beta": prefix.with_suffix(".beta"),
        }
        paths["graph"].write_text(format_graph_file(inst.graph))
        paths["alpha"].write_text(format_vertex_set_file(inst.alpha))
        paths["beta"].write_text(format_vertex_set_file(inst.beta))
        for name, path in paths.items():
            print(f"{name}: {path}")
        return EXIT_OK

    if args.command == "validate":
        inst = _load_instance(args)
        sched = parse_schedule_file(_read(args.schedule))
        report = validate(inst, sched, PropertySpec(args.d))
        if report.valid:
            print("valid")
            return EXIT_OK
        print(report.first_violation.describe())
        return EXIT_NEGATIVE

    if args.command == "bench":
        return _bench(args, seed)

    raise InputError(f"unknown command {args.command!r}")


def _bench(args, seed: int) -> int:
    sizes = []
    for tok in args.n.split(","):
        tok = tok.strip()
        if tok:
            sizes.append(int(tok))
    if not sizes:
        raise InputError("bench needs at least one size")
    lines = [
        f"# misrecon bench family={args.family} algo={args.algo} seed={seed} "
        f"k={args.k if args.k is not None else ''} p={args.p if args.p is not None else ''}",
        "family,n,k,schedule_length,rounds_used,messages",
    ]
    for n in sizes:
        inst = gen_gadget(args.family, n=n, k=args.k, p=args.p, seed=seed)
        if args.algo == "const-length":
            sched, report = constant_length_schedule_distributed(inst, seed=seed)
        else:
            sched, report = constant_rounds_schedule(inst)
        lines.append(
            f"{args.family},{n},{args.k if args.k is not None else ''},"
            f"{sched.length},{report.rounds_used},{report.messages_sent}"
        )
    table = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def export_dot(
    g: Graph,
    alpha: VertexSet | None = None,
    beta: VertexSet | None = None,
    schedule: Schedule | None = None,
    step: int | None = None,
) -> str:
    """Deterministic DOT rendering: alpha white, beta grey, epsilon black,
    shared nodes pale green; the selected step's members are double-ringed."""
    current: VertexSet | None = None
    if schedule is not None and step is not None:
        if not 0 <= step < len(schedule.steps):
            raise InputError(f"step index {step} out of range")
        current = schedule.steps[step]
    alpha = alpha or frozenset()
    beta = beta or frozenset()
    lines = ["graph misrecon {", "  node [style=filled];"]
    for v in sorted(g.nodes):
        if v in alpha and v in beta:
            fill, font = "palegreen", "black"
        elif v in alpha:
            fill, font = "white", "black"
        elif v in beta:
            fill, font = "grey", "black"
        else:
            fill, font = "black", "white"
        attrs = [f'fillcolor="{fill}"', f'fontcolor="{font}"']
        if current is not None and v in current:
            attrs.append("peripheries=2")
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for u, v in g.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return dispatch(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
