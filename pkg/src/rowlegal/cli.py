"""Command line: ``rowlegal {solve,check,compare,bench,gen}``."""

from __future__ import annotations

import argparse
import json
import sys

from . import bench, double_row, oracle, single_row
from .errors import InfeasibleError, OracleLimitError, ValidationError
from .generate import GeneratorSpec, generate
from .io import emit, parse, solution_to_dict
from .single_row import SingleRowInstance

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_MISMATCH = 0, 2, 3, 4

# exact oracle: agreement both ways; grid oracle: solver may not exceed it
EXACT_TOL = 1e-6
GRID_TOL = 1e-9


def _rel(a: float, b: float) -> float:
    return (a - b) / max(1.0, abs(a), abs(b))


def _solve(inst):
    if isinstance(inst, SingleRowInstance):
        return single_row.solve(inst)
    return double_row.solve(inst)


def _oracle(inst, step: float):
    cfg = oracle.OracleConfig(step=step)
    if isinstance(inst, SingleRowInstance):
        if len(inst) <= cfg.max_cells:
            try:
                return oracle.single_row_exact(inst, cfg), True
            except OracleLimitError:
                pass
        return oracle.single_row_grid(inst, cfg), False
    return oracle.double_row_grid(inst, cfg), False


def cmd_solve(args) -> int:
    inst = parse(args.file)
    sol = _oracle(inst, args.step)[0] if args.oracle else _solve(inst)
    if args.site_pitch is not None:
        if isinstance(inst, SingleRowInstance):
            raise ValidationError("--site-pitch applies to double-row files only")
        sol = double_row.snap_to_sites(inst, sol, args.site_pitch)
    print(json.dumps(solution_to_dict(inst, sol)))
    return EXIT_OK


def cmd_check(args) -> int:
    inst = parse(args.file)
    sol = _solve(inst)
    ref, exact = _oracle(inst, args.step)
    gap = _rel(sol.total_cost, ref.total_cost)
    kind = "exact" if exact else f"grid(step={args.step:g})"
    print(json.dumps({"format": 1, "solver": sol.total_cost, "oracle": ref.total_cost,
                      "oracle_kind": kind, "relative_gap": gap}))
    if exact:
        ok = abs(gap) <= EXACT_TOL
    else:
        if isinstance(inst, SingleRowInstance):
            bound = oracle.refinement_bound(inst.cells, inst.x_min, inst.x_max, args.step)
        else:
            bound = oracle.double_row_refinement_bound(inst, args.step)
        ok = gap <= GRID_TOL and sol.total_cost >= ref.total_cost - bound - GRID_TOL * max(1.0, abs(ref.total_cost))
    return EXIT_OK if ok else EXIT_MISMATCH


def compare_costs(inst) -> tuple[float, float, float]:
    """Optimal cost, fixed-doubles baseline cost and their ratio (1 when both are zero)."""
    opt = double_row.solve(inst).total_cost
    base = double_row.solve_fixed_doubles(inst, double_row.baseline_positions(inst)).total_cost
    return opt, base, (opt / base if base > 0 else 1.0)


def cmd_compare(args) -> int:
    inst = parse(args.file)
    if isinstance(inst, SingleRowInstance):
        raise ValidationError("compare needs a double-row file")
    opt, base, ratio = compare_costs(inst)
    print(json.dumps({"format": 1, "optimal": opt, "fixed_doubles": base, "ratio": ratio}))
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(",") if s)
    rows = bench.run(bench.BenchConfig(sizes=sizes, seed=args.seed, repeat=args.repeat))
    sys.stdout.write(bench.to_csv(rows))
    return EXIT_OK


def cmd_gen(args) -> int:
    with open(args.spec) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON: {exc.msg}", "") from None
    try:
        spec = GeneratorSpec.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), "") from None
    emit(generate(spec), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rowlegal", description="Optimal single- and double-row legalization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file, print positions and cost as JSON")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="use the brute-force oracle instead of the solver")
    p.add_argument("--step", type=float, default=0.01, help="grid step of the oracle")
    p.add_argument("--site-pitch", type=float, default=None, help="snap double cells to sites (heuristic)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="compare the solver with the oracle")
    p.add_argument("file")
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compare", help="cost ratio against the fixed-doubles baseline")
    p.add_argument("file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time single-row solves, CSV on stdout")
    p.add_argument("--sizes", default="10000,100000,1000000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a random instance from a generator spec (JSON)")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValidationError, OracleLimitError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
