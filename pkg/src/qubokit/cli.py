"""Command-line interface.

Every subcommand prints one JSON object per line on stdout; diagnostics go to
stderr. Instances are read from and written to qbfile format; ``-`` (the
default input) means stdin. ``gen`` without ``-o`` writes the instance bytes
to stdout so commands can be piped::

    qubokit gen --n 16 --seed 1 | qubokit info

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 size cap
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import qbfile
from .assignment import PartialAssignment, from_pairs, parse_assignment_expr, parse_bitvec_expr
from .bitvec import from_string, to_string
from .core import QuboInstance
from .errors import QuboError, ResourceCapError
from .preprocessing import qpro_plus, reduce_dynamic_range
from .probability import log_partition, pairwise_marginals, probabilities
from .sampling import gibbs_sample_exact
from .solving import brute_force, local_search, simulated_annealing

EXIT_USAGE, EXIT_DATA, EXIT_CAP = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(obj, out) -> None:
    out.write(json.dumps(obj) + "\n")


def _read_instance(path: str, stdin) -> QuboInstance:
    if path == "-":
        return qbfile.loads(stdin.read())
    return qbfile.load(path)


def _write_instance(q: QuboInstance, path: str | None) -> dict:
    if path is None:
        return {"weights": q.m.tolist()}
    qbfile.save(q, path)
    return {"output": path}


def _read_assignment(path: str, n: int | None) -> PartialAssignment:
    with open(path, encoding="utf-8") as fh:
        text = fh.read().strip()
    if "x" in text:
        if n is None:
            raise UsageError(f"{path}: assignment expressions need --n")
        return parse_assignment_expr(text, n)
    return parse_bitvec_expr(text)


def _write_assignment(pa: PartialAssignment, path: str | None) -> None:
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(pa.to_bitvec_expression() + "\n")


def _solution(sol) -> dict:
    return {"x": to_string(sol.x) if sol.x.size else "", "energy": sol.energy, "meta": sol.meta}


# -- subcommands -------------------------------------------------------------


def cmd_gen(args, stdin, stdout):
    q = QuboInstance.random(args.n, distr=args.distr, density=args.density, seed=args.seed)
    if args.output is None:
        getattr(stdout, "buffer", stdout).write(qbfile.dumps(q))
        stdout.flush()
        return
    qbfile.save(q, args.output)
    _emit({"n": q.n, "output": args.output}, stdout)


def cmd_info(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    _emit({"n": q.n, "nnz": q.nnz(), "density": q.density(), "dynamic_range": q.dynamic_range()}, stdout)


def cmd_energy(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    _emit({"x": args.x, "energy": q.energy(from_string(args.x))}, stdout)


def cmd_clamp(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    if args.expr is not None:
        pa = parse_assignment_expr(args.expr, q.n)
    elif args.bitvec_expr is not None:
        pa = parse_bitvec_expr(args.bitvec_expr)
    else:
        try:
            pairs = {int(k): int(v) for k, v in json.loads(args.pairs).items()}
        except (ValueError, AttributeError) as e:
            raise UsageError(f"--pairs must be a JSON object of index to bit: {e}") from None
        pa = from_pairs(pairs, q.n)
    reduced, const = pa.apply(q)
    _write_assignment(pa, args.save_assignment)
    _emit({"n": reduced.n, "constant": const, "assignment": str(pa), "free": list(pa.free),
           **_write_instance(reduced, args.output)}, stdout)


def cmd_preprocess(args, stdin, stdout):
    if not (args.qpro_plus or args.dr_reduce):
        raise UsageError("preprocess: give --qpro-plus and/or --dr-reduce")
    q = _read_instance(args.instance, stdin)
    result = {"n_in": q.n, "dynamic_range_in": q.dynamic_range()}
    out, const = q, 0.0
    if args.qpro_plus:
        report = qpro_plus(q)
        out, const = report.apply(q)
        _write_assignment(report.assignment, args.save_assignment)
        result.update(assignment=str(report.assignment), rules_fired=[[r, list(v)] for r, v in report.rules_fired])
    if args.dr_reduce:
        out = reduce_dynamic_range(out, seed=args.seed)
    result.update(n=out.n, constant=const, dynamic_range=out.dynamic_range(), **_write_instance(out, args.output))
    _emit(result, stdout)


def cmd_solve(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    if args.method == "brute":
        sol = brute_force(q, threads=args.threads)
    elif args.method == "sa":
        t0 = "auto" if args.t0 == "auto" else float(args.t0)
        sol = simulated_annealing(q, steps=args.steps, t0=t0, alpha=args.alpha, seed=args.seed)
    else:
        sol = local_search(q, restarts=args.restarts, seed=args.seed)
    _emit(_solution(sol), stdout)


def cmd_expand(args, stdin, stdout):
    x = from_string(args.x) if args.x else np.zeros(0)
    # files are given in the order they were applied; undo the last first
    for path in reversed(args.assignment_file):
        x = _read_assignment(path, args.n).expand(x)
    result = {"x": to_string(x)}
    if args.instance is not None:
        result["energy"] = qbfile.load(args.instance).energy(x)
    _emit(result, stdout)


def cmd_convert(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    ising = q.to_ising()
    _emit({"h": ising.h.tolist(), "J": ising.J.tolist(), "constant": ising.constant}, stdout)


def cmd_probs(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    result = {}
    if args.log_partition:
        result["log_partition"] = log_partition(q, args.beta)
    if args.marginals:
        result["marginals"] = pairwise_marginals(q, args.beta).tolist()
    if not result or args.vector:
        result["probabilities"] = probabilities(q, args.beta).tolist()
    _emit(result, stdout)


def cmd_sample(args, stdin, stdout):
    q = _read_instance(args.instance, stdin)
    s = gibbs_sample_exact(q, args.beta, args.m, seed=args.seed)
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(s.dumps())
    _emit({"n": s.n, "total": s.total, "counts": dict(sorted(s.counts.items()))}, stdout)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qubokit", description="Create, preprocess and solve QUBO instances.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_cmd(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("instance", nargs="?", default="-", help="qbfile path, '-' for stdin")
        sp.set_defaults(func=func)
        return sp

    sp = sub.add_parser("gen", help="sample a random instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--distr", choices=["normal", "uniform"], default="normal")
    sp.add_argument("--density", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    instance_cmd("info", cmd_info, "size, density and dynamic range")

    sp = instance_cmd("energy", cmd_energy, "energy of a bit string")
    sp.add_argument("--x", required=True)

    sp = instance_cmd("clamp", cmd_clamp, "apply a partial assignment")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--expr", help="assignment expression, e.g. 'x1=0; x5=!x4'")
    g.add_argument("--bitvec-expr", help="bit vector expression, e.g. '**0[1]*'")
    g.add_argument("--pairs", help='JSON object, e.g. \'{"0": 1, "5": 0}\'')
    sp.add_argument("-o", "--output")
    sp.add_argument("--save-assignment", help="write the assignment as a bit vector expression")

    sp = instance_cmd("preprocess", cmd_preprocess, "QPRO+ and/or dynamic range reduction")
    sp.add_argument("--qpro-plus", action="store_true")
    sp.add_argument("--dr-reduce", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.add_argument("--save-assignment")

    sp = instance_cmd("solve", cmd_solve, "minimize the energy")
    sp.add_argument("--method", choices=["brute", "sa", "local"], default="brute")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--steps", type=int, default=10_000)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--t0", default="auto")
    sp.add_argument("--restarts", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("expand", help="re-insert clamped variables into a solution")
    sp.add_argument("--assignment-file", action="append", required=True,
                    help="repeat in the order the assignments were applied")
    sp.add_argument("--x", required=True, help="reduced bit string ('' for none)")
    sp.add_argument("--n", type=int, help="full size, for assignment-expression files")
    sp.add_argument("--instance", help="full instance; adds its energy to the output")
    sp.set_defaults(func=cmd_expand)

    sp = instance_cmd("convert", cmd_convert, "convert to another model")
    sp.add_argument("--to", choices=["ising"], default="ising")

    sp = instance_cmd("probs", cmd_probs, "Gibbs distribution quantities")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--marginals", action="store_true")
    sp.add_argument("--log-partition", action="store_true")
    sp.add_argument("--vector", action="store_true", help="include probabilities with other outputs")

    sp = instance_cmd("sample", cmd_sample, "exact Gibbs samples")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", help="also write the sample in text form")
    return p


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin.buffer
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.func(args, stdin, stdout)
    except UsageError as e:
        print(e, file=stderr)
        return EXIT_USAGE
    except ResourceCapError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_CAP
    except (QuboError, OSError) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_DATA
    except SystemExit as e:  # --help
        return int(e.code or 0)
    return 0


def main() -> None:
    sys.exit(run())
