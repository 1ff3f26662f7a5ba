"""Command-line driver.

Subcommands:

* count-cnf / count-setcover: approximate satisfying-assignment counts for
  monotone CNF (DIMACS) or set-cover instances.
* count-matching / count-3dm: approximate matching counts for hypergraphs
  (count-3dm insists on 3-uniform edges) or raw at-most-one JSON.
* exact: exhaustive-enumeration count for any supported input.
* verify-decay: run the decay-rate regression suite.
* gen: emit a reproducible random instance.
* bench: time truncated evaluation at a ladder of depths.

Exit codes: 0 success, 2 invalid input, 3 node budget exceeded, 4 decay
bound regression failed.

Reports serialize to key-sorted JSON with no timing fields, so identical
input, seed, mode, and thread count reproduce byte-identical reports; wall
time goes to stderr.  COVERCOUNT_THREADS caps worker threads.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from . import amo as amo_mod
from . import counter as counter_mod
from .amo import AmoInstance, Hypergraph, from_hypergraph, normalize
from .cnf import MonotoneCnf, wellform
from .counter import CountMode, Estimate, adaptive, certified, heuristic
from .decay import verify_all_bounds
from .errors import (
    CoverCountError,
    FormatError,
    NodeBudgetExceededError,
    UnsatisfiableError,
)
from .formats import FORMATS, guess_format, parse, serialize
from .marginal import TruncationPolicy
from .oracle import exact_count, gen_random_deg4_hypergraph, gen_random_read5_cnf

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_BUDGET = 3
EXIT_BOUND_FAILED = 4

RENDER_LIMIT = 40  # print integer counts only while exp() is exact enough


@dataclass
class RunReport:
    """Stable record of one counting run.

    wall_time is carried for the human summary but excluded from the
    canonical serialization, which must be byte-identical across reruns.
    """

    subcommand: str
    input_sha256: str
    fmt: str
    mode: str
    depth: int | None
    epsilon: float | None
    ln_z: float
    count: str | None
    guarantee: str
    nodes_visited: int
    n_vars: int
    seed: int | None
    wall_time: float

    def record(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "input_sha256": self.input_sha256,
            "format": self.fmt,
            "mode": self.mode,
            "depth": self.depth,
            "epsilon": self.epsilon,
            # null rather than the nonstandard -Infinity token for Z = 0
            "ln_z": self.ln_z if self.ln_z != float("-inf") else None,
            "count": self.count,
            "guarantee": self.guarantee,
            "nodes_visited": self.nodes_visited,
            "n_vars": self.n_vars,
            "seed": self.seed,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.record(), sort_keys=True, separators=(",", ":"))

    def human(self) -> str:
        lines = [
            f"instance : sha256 {self.input_sha256[:16]}…  ({self.fmt}, {self.n_vars} variables)",
            f"mode     : {self.mode}" + (f", depth {self.depth}" if self.depth is not None else ""),
            f"ln(Z)    : {self.ln_z}",
        ]
        if self.count is not None:
            lines.append(f"Z        : {self.count}")
        lines.append(f"guarantee: {self.guarantee}")
        lines.append(f"nodes    : {self.nodes_visited}")
        lines.append(f"wall     : {self.wall_time:.3f}s")
        return "\n".join(lines)


def _threads() -> int:
    raw = os.environ.get("COVERCOUNT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _resolve_format(args, default: str) -> str:
    if args.format:
        return args.format
    if args.input != "-":
        guessed = guess_format(args.input)
        if guessed:
            return guessed
    return default


def _mode_from_args(args) -> CountMode:
    if args.mode == "certified":
        return certified(args.epsilon)
    if args.mode == "heuristic":
        if args.depth is None:
            raise FormatError("--mode heuristic requires --depth")
        return heuristic(args.depth)
    return adaptive(args.epsilon)


def _render_count(log_count: float, n_vars: int, exact: int | None = None) -> str | None:
    if exact is not None:
        return str(exact)
    if n_vars > RENDER_LIMIT:
        return None
    if log_count == float("-inf"):
        return "0"
    return str(round(math.exp(log_count)))


def _zero_report(subcommand, digest, fmt, mode, n_vars, seed, started) -> RunReport:
    return RunReport(
        subcommand=subcommand,
        input_sha256=digest,
        fmt=fmt,
        mode=mode.kind,
        depth=None,
        epsilon=mode.epsilon,
        ln_z=float("-inf"),
        count="0",
        guarantee="exact: input is unsatisfiable",
        nodes_visited=0,
        n_vars=n_vars,
        seed=seed,
        wall_time=time.perf_counter() - started,
    )


def _estimate_report(
    subcommand, digest, fmt, mode, est: Estimate, n_vars, seed, started
) -> RunReport:
    return RunReport(
        subcommand=subcommand,
        input_sha256=digest,
        fmt=fmt,
        mode=mode.kind,
        depth=est.depth,
        epsilon=mode.epsilon,
        ln_z=est.log_count,
        count=_render_count(est.log_count, n_vars),
        guarantee=mode.describe(),
        nodes_visited=est.nodes_visited,
        n_vars=n_vars,
        seed=seed,
        wall_time=time.perf_counter() - started,
    )


def _emit(report: RunReport, as_json: bool) -> None:
    if as_json:
        print(report.canonical_json())
    else:
        print(report.human())
    print(f"wall time: {report.wall_time:.3f}s", file=sys.stderr)


def _cmd_count_cnf(args, subcommand: str, default_fmt: str) -> int:
    started = time.perf_counter()
    data = _read_input(args.input)
    digest = hashlib.sha256(data).hexdigest()
    fmt = _resolve_format(args, default_fmt)
    raw = parse(data, fmt)
    if not isinstance(raw, MonotoneCnf):
        raise FormatError(f"format {fmt!r} does not yield a CNF instance")
    mode = _mode_from_args(args)
    policy = TruncationPolicy(node_budget=args.node_budget)
    try:
        formed = wellform(raw)
    except UnsatisfiableError:
        _emit(_zero_report(subcommand, digest, fmt, mode, raw.n_vars, args.seed, started), args.json)
        return EXIT_OK
    est = counter_mod.count_cnf(formed, mode, policy, threads=_threads())
    _emit(_estimate_report(subcommand, digest, fmt, mode, est, raw.n_vars, args.seed, started), args.json)
    return EXIT_OK


def _to_amo(parsed, fmt: str, require_3dm: bool) -> AmoInstance:
    if isinstance(parsed, Hypergraph):
        if require_3dm:
            bad = [i for i, e in enumerate(parsed.edges) if len(e) != 3]
            if bad:
                raise FormatError(f"edge #{bad[0] + 1} is not 3-uniform")
        return from_hypergraph(parsed)
    if isinstance(parsed, AmoInstance):
        if require_3dm:
            raise FormatError("count-3dm expects a hypergraph input")
        return parsed
    raise FormatError(f"format {fmt!r} does not yield a matching instance")


def _cmd_count_matching(args, subcommand: str, require_3dm: bool) -> int:
    started = time.perf_counter()
    data = _read_input(args.input)
    digest = hashlib.sha256(data).hexdigest()
    fmt = _resolve_format(args, "hypergraph")
    inst = _to_amo(parse(data, fmt), fmt, require_3dm)
    mode = _mode_from_args(args)
    policy = TruncationPolicy(node_budget=args.node_budget)
    try:
        normalized = normalize(inst)
    except UnsatisfiableError:
        _emit(_zero_report(subcommand, digest, fmt, mode, inst.n_vars, args.seed, started), args.json)
        return EXIT_OK
    est = amo_mod.count_matchings(normalized, mode, policy, threads=_threads())
    _emit(_estimate_report(subcommand, digest, fmt, mode, est, inst.n_vars, args.seed, started), args.json)
    return EXIT_OK


def _cmd_exact(args) -> int:
    started = time.perf_counter()
    data = _read_input(args.input)
    digest = hashlib.sha256(data).hexdigest()
    fmt = _resolve_format(args, "dimacs")
    parsed = parse(data, fmt)
    if isinstance(parsed, Hypergraph):
        parsed = from_hypergraph(parsed)
    try:
        count = exact_count(parsed, cap=args.oracle_cap)
    except UnsatisfiableError:
        count = 0
    report = RunReport(
        subcommand="exact",
        input_sha256=digest,
        fmt=fmt,
        mode="exact",
        depth=None,
        epsilon=None,
        ln_z=math.log(count) if count > 0 else float("-inf"),
        count=str(count),
        guarantee="exact by exhaustive enumeration",
        nodes_visited=0,
        n_vars=parsed.n_vars,
        seed=args.seed,
        wall_time=time.perf_counter() - started,
    )
    _emit(report, args.json)
    return EXIT_OK


def _cmd_verify_decay(args) -> int:
    reports = verify_all_bounds()
    records = [r.to_record() for r in reports]
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(records, fh, sort_keys=True, indent=2)
    if args.json:
        print(json.dumps(records, sort_keys=True, separators=(",", ":")))
    else:
        widths = max(len(r.name) for r in reports)
        for r in reports:
            status = "ok " if r.passed else "FAIL"
            where = ""
            if r.kind == "grid-max" and r.argmax is not None:
                where = "  at (" + ", ".join(f"{c:.4f}" for c in r.argmax) + ")"
            print(
                f"{status} {r.name:<{widths}} value={r.value: .6f} "
                f"bound={r.bound: .6f} margin={r.margin: .2e}{where}"
            )
    failed = [r for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} bound regression(s) failed", file=sys.stderr)
        return EXIT_BOUND_FAILED
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "cnf":
        inst = gen_random_read5_cnf(
            args.seed, args.vars, args.clauses, (args.arity_min, args.arity_max)
        )
        fmt = args.format or "dimacs"
    else:
        inst = gen_random_deg4_hypergraph(
            args.seed, args.vertices, args.edges, (args.size_min, args.size_max)
        )
        fmt = args.format or "hypergraph"
    sys.stdout.write(serialize(inst, fmt))
    return EXIT_OK


def _cmd_bench(args) -> int:
    data = _read_input(args.input)
    fmt = _resolve_format(args, "dimacs")
    parsed = parse(data, fmt)
    policy = TruncationPolicy(node_budget=args.node_budget)
    depths = [int(d) for d in args.depths.split(",")]
    rows = []
    for depth in depths:
        t0 = time.perf_counter()
        try:
            if isinstance(parsed, MonotoneCnf):
                est = counter_mod.count_cnf(wellform(parsed), heuristic(depth), policy)
            else:
                inst = parsed if isinstance(parsed, AmoInstance) else from_hypergraph(parsed)
                est = amo_mod.count_matchings(inst, heuristic(depth), policy)
        except NodeBudgetExceededError:
            rows.append({"depth": depth, "status": "budget-exceeded"})
            continue
        rows.append(
            {
                "depth": depth,
                "status": "ok",
                "ln_z": est.log_count,
                "nodes": est.nodes_visited,
                "seconds": round(time.perf_counter() - t0, 6),
            }
        )
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def _add_count_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="input file, or - for stdin")
    p.add_argument("--format", choices=FORMATS, help="input format (default: by extension)")
    p.add_argument("--mode", choices=("certified", "heuristic", "adaptive"), default="adaptive")
    p.add_argument("--epsilon", type=float, default=0.05, help="target relative error")
    p.add_argument("--depth", type=int, help="fixed depth for --mode heuristic")
    p.add_argument("--node-budget", type=int, default=TruncationPolicy().node_budget)
    p.add_argument("--seed", type=int, default=None, help="recorded in the report")
    p.add_argument("--json", action="store_true", help="print the canonical JSON report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="covercount",
        description="Deterministic approximate counting for monotone CNF / set covers "
        "and bounded-degree hypergraph matchings.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    for name, default_fmt in (("count-cnf", "dimacs"), ("count-setcover", "setcover")):
        p = sub.add_parser(name, help=f"approximate count for a {default_fmt} instance")
        _add_count_flags(p)
        p.set_defaults(func=lambda a, n=name, f=default_fmt: _cmd_count_cnf(a, n, f))

    for name, require in (("count-matching", False), ("count-3dm", True)):
        p = sub.add_parser(name, help="approximate matching count")
        _add_count_flags(p)
        p.set_defaults(func=lambda a, n=name, r=require: _cmd_count_matching(a, n, r))

    p = sub.add_parser("exact", help="exhaustive-enumeration count")
    p.add_argument("input")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--oracle-cap", type=int, default=30)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("verify-decay", help="run the decay-rate regression suite")
    p.add_argument("--json", action="store_true", help="print records as JSON")
    p.add_argument("--json-out", help="also write records to this path")
    p.set_defaults(func=_cmd_verify_decay)

    p = sub.add_parser("gen", help="generate a reproducible random instance")
    p.add_argument("kind", choices=("cnf", "hypergraph"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--vars", type=int, default=12)
    p.add_argument("--clauses", type=int, default=15)
    p.add_argument("--arity-min", type=int, default=2)
    p.add_argument("--arity-max", type=int, default=5)
    p.add_argument("--vertices", type=int, default=9)
    p.add_argument("--edges", type=int, default=10)
    p.add_argument("--size-min", type=int, default=3)
    p.add_argument("--size-max", type=int, default=3)
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="time truncated counting at several depths")
    p.add_argument("input")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--depths", default="1,2,4,8")
    p.add_argument("--node-budget", type=int, default=TruncationPolicy().node_budget)
    p.set_defaults(func=_cmd_bench)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NodeBudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FormatError, UnsatisfiableError, CoverCountError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
