"""Command-line front end.

Subcommands::

    abfode solve    --problem ID [--alpha A --t-end T --steps N --y0 V ...]
    abfode table    {1,2,3}
    abfode ml       --alpha A --z Z
    abfode compare  --problem ID --alphas A1,A2,... [--classical]
    abfode weights  --alpha A --n N

Exit status is 0 on success, 2 on usage or parse errors and 3 when the
numerics fail (non-converging implicit solve or special function).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from abfode.closed_forms import (
    classical_logistic,
    exact_example1,
    exact_example3,
    rk4_reference,
)
from abfode.operators import Mesh
from abfode.solver import (
    RHS_REGISTRY,
    ImplicitSolveError,
    Problem,
    RhsSpec,
    SolverConfig,
    Trajectory,
    integrate,
)
from abfode.special import DomainError, NonConvergenceError, Order, mittag_leffler
from abfode.weights import rectangle_weights, trapezoid_weights

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

#: minimum number of RK4 steps used for classical references
RK4_MIN_STEPS = 1000


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ProblemDefaults:
    alpha: float
    steps: int
    y0: tuple[float, ...]
    t_end: float = 1.0


DEFAULTS: dict[str, ProblemDefaults] = {
    "linear_t": ProblemDefaults(0.5, 10, (0.0,)),
    "exp_ty": ProblemDefaults(0.9, 20, (1.0,)),
    "linear_y": ProblemDefaults(0.9, 20, (1.0,)),
    "logistic": ProblemDefaults(0.99, 100, (0.5,)),
    "lotka_volterra": ProblemDefaults(0.9, 100, (1.0, 1.0)),
}

# reference discretizations reproduced by the ``table`` command
TABLE_EXAMPLES = {
    "1": ("linear_t", 0.5, 10, 0.0),
    "2": ("exp_ty", 0.9, 20, 1.0),
    "3": ("linear_y", 0.9, 20, 1.0),
}


# {{{ problem files


@dataclass
class ProblemFile:
    rhs_id: str
    alpha: float
    t_end: float
    steps: int
    y0: list[float]
    params: dict[str, float] = field(default_factory=dict)
    output: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> ProblemFile:
        if not isinstance(data, dict):
            raise UsageError("problem file must contain a single JSON object")
        allowed = {"rhs_id", "params", "alpha", "t_end", "steps", "y0", "output"}
        unknown = set(data) - allowed
        if unknown:
            raise UsageError(f"unknown keys in problem file: {', '.join(sorted(unknown))}")
        missing = {"rhs_id", "alpha", "t_end", "steps", "y0"} - set(data)
        if missing:
            raise UsageError(f"missing keys in problem file: {', '.join(sorted(missing))}")

        y0 = data["y0"]
        if not isinstance(y0, list):
            y0 = [y0]
        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise UsageError("'params' must be an object of name -> number")

        try:
            return cls(
                rhs_id=str(data["rhs_id"]),
                alpha=float(data["alpha"]),
                t_end=float(data["t_end"]),
                steps=_as_int(data["steps"]),
                y0=[float(v) for v in y0],
                params={str(k): float(v) for k, v in params.items()},
                output=data.get("output"),
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value in problem file: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> ProblemFile:
        try:
            with open(path, encoding="utf-8") as infile:
                data = json.load(infile)
        except OSError as exc:
            raise UsageError(f"cannot read problem file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"problem file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _as_int(value) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


# }}}


# {{{ argument parsing helpers


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc
    return values


def _param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"parameter {name!r} needs a number") from exc


def _add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", help="built-in right-hand side id")
    parser.add_argument("--config", help="flat JSON problem file")
    parser.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    parser.add_argument("--t-end", type=float, help="final time T")
    parser.add_argument("--steps", type=int, help="number of steps N")
    parser.add_argument("--y0", type=_float_list, help="initial state, comma-separated")
    parser.add_argument(
        "--param", type=_param, action="append", default=[], help="NAME=VALUE (repeatable)"
    )
    parser.add_argument("--output", help="output CSV path (default: stdout)")


def _resolve(args: argparse.Namespace) -> ProblemFile:
    if args.config is not None:
        spec = ProblemFile.load(args.config)
        if args.problem is not None and args.problem != spec.rhs_id:
            raise UsageError("--problem conflicts with rhs_id of the problem file")
    elif args.problem is not None:
        if args.problem not in DEFAULTS:
            raise UsageError(
                f"unknown problem {args.problem!r}; see 'abfode solve --list'"
            )
        d = DEFAULTS[args.problem]
        spec = ProblemFile(args.problem, d.alpha, d.t_end, d.steps, list(d.y0))
    else:
        raise UsageError("either --problem or --config is required")

    if args.alpha is not None:
        spec.alpha = args.alpha
    if args.t_end is not None:
        spec.t_end = args.t_end
    if args.steps is not None:
        spec.steps = args.steps
    if args.y0 is not None:
        spec.y0 = args.y0
    spec.params = {**spec.params, **dict(args.param)}
    if args.output is not None:
        spec.output = args.output

    return spec


def _build_problem(spec: ProblemFile, alpha: float | None = None) -> Problem:
    return Problem(
        rhs=RhsSpec(spec.rhs_id, spec.params),
        order=Order(spec.alpha if alpha is None else alpha),
        mesh=Mesh(spec.t_end, spec.steps),
        y0=np.array(spec.y0),
    )


# }}}


# {{{ references


def exact_reference(problem: Problem) -> np.ndarray:
    """Closed-form fractional solution at the mesh nodes, where one is known."""
    t = problem.mesh.nodes
    alpha = problem.order.alpha
    y0 = float(problem.y0[0])
    rid = problem.rhs.id

    if rid == "linear_t":
        if alpha == 1.0:
            return (y0 + 0.5 * t**2)[:, None]
        return np.array([[exact_example1(ti, alpha, y0)] for ti in t])
    if rid == "linear_y":
        if alpha == 1.0:
            return (y0 * np.exp(t))[:, None]
        return np.array([[exact_example3(ti, alpha, y0)] for ti in t])

    raise UsageError(f"no closed-form fractional solution is known for {rid!r}")


def classical_reference(problem: Problem) -> np.ndarray:
    """Solution of the integer-order problem ``y' = g(t, y)`` at the mesh nodes."""
    t = problem.mesh.nodes
    rid = problem.rhs.id
    y0 = problem.y0

    if rid == "logistic":
        r = problem.rhs.params["r"]
        return np.array([[classical_logistic(ti, r, float(y0[0]))] for ti in t])
    if rid == "linear_t":
        return (y0[0] + 0.5 * t**2)[:, None]
    if rid == "linear_y":
        return (y0[0] * np.exp(t))[:, None]

    substeps = max(1, math.ceil(RK4_MIN_STEPS / problem.mesh.n_steps))
    return rk4_reference(problem.rhs, y0, problem.mesh, substeps=substeps).values


# }}}


# {{{ output


def format_number(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(header: Sequence[str], columns: Sequence[np.ndarray], path: str | None) -> None:
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([format_number(v) for v in row])

    text = buffer.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as outfile:
            outfile.write(text)


def trajectory_columns(
    trajectory: Trajectory,
    *,
    predictor: bool = False,
    reference: np.ndarray | None = None,
) -> tuple[list[str], list[np.ndarray]]:
    dim = trajectory.dim
    header = ["t"] + [f"y{i}" for i in range(dim)]
    columns = [trajectory.t] + [trajectory.corrector_values[:, i] for i in range(dim)]

    if predictor:
        header += [f"p{i}" for i in range(dim)]
        columns += [trajectory.predictor_values[:, i] for i in range(dim)]
    if reference is not None:
        for i in range(dim):
            header += [f"exact{i}", f"err{i}"]
            columns += [
                reference[:, i],
                np.abs(trajectory.corrector_values[:, i] - reference[:, i]),
            ]

    return header, columns


def format_table_value(x: float) -> str:
    # six significant digits, whole numbers printed as "1."
    text = format(float(x), ".6g")
    if "." not in text and "e" not in text:
        text += "."
    return text


# }}}


# {{{ commands


def cmd_solve(args: argparse.Namespace) -> int:
    if args.list:
        for name in sorted(RHS_REGISTRY):
            definition = RHS_REGISTRY[name]
            d = DEFAULTS.get(name)
            params = ", ".join(f"{k}={v:g}" for k, v in definition.defaults.items())
            line = f"{name:16s} dim={definition.dim}  {definition.description}"
            if params:
                line += f"  [{params}]"
            if d is not None:
                y0 = ",".join(f"{v:g}" for v in d.y0)
                line += f"  (defaults: alpha={d.alpha:g} t_end={d.t_end:g} steps={d.steps} y0={y0})"
            print(line)
        return EXIT_OK

    if args.with_exact and args.with_classical:
        raise UsageError("--with-exact and --with-classical are mutually exclusive")

    spec = _resolve(args)
    problem = _build_problem(spec)
    trajectory = integrate(problem, SolverConfig())

    reference = None
    if args.with_exact:
        reference = exact_reference(problem)
    elif args.with_classical:
        reference = classical_reference(problem)

    header, columns = trajectory_columns(
        trajectory, predictor=args.with_predictor, reference=reference
    )
    write_csv(header, columns, spec.output)
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    rid, alpha, steps, y0 = TABLE_EXAMPLES[args.example]
    problem = Problem(RhsSpec(rid), Order(alpha), Mesh(1.0, steps), np.array([y0]))
    trajectory = integrate(problem, SolverConfig())

    # the first example's tables include the initial value
    start = 0 if args.example == "1" else 1
    for name, values in (
        ("predictor", trajectory.predictor_values[start:, 0]),
        ("corrector", trajectory.corrector_values[start:, 0]),
    ):
        print(name)
        print(", ".join(format_table_value(v) for v in values))
    return EXIT_OK


def cmd_ml(args: argparse.Namespace) -> int:
    print(format(mittag_leffler(args.alpha, args.z), ".15g"))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    alphas = args.alphas
    if not alphas:
        raise UsageError("--alphas needs at least one order")
    for alpha in alphas:
        if not 0.0 < alpha <= 1.0:
            raise UsageError(f"orders must lie in (0, 1], got {alpha!r}")

    spec = _resolve(args)
    problems = [_build_problem(spec, alpha) for alpha in alphas]
    trajectories = [integrate(p, SolverConfig()) for p in problems]

    dim = problems[0].rhs.dim
    header = ["t"]
    columns = [problems[0].mesh.nodes]
    for alpha, trajectory in zip(alphas, trajectories):
        header += [f"y{i}_a{alpha:g}" for i in range(dim)]
        columns += [trajectory.corrector_values[:, i] for i in range(dim)]
    if args.classical:
        reference = classical_reference(problems[0])
        header += [f"y{i}_classical" for i in range(dim)]
        columns += [reference[:, i] for i in range(dim)]

    write_csv(header, columns, spec.output)
    return EXIT_OK


def cmd_weights(args: argparse.Namespace) -> int:
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    a = trapezoid_weights(args.n, args.alpha)
    b = rectangle_weights(args.n, args.alpha)

    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["j", "a", "b"])
    for j, aj in enumerate(a):
        writer.writerow([j, format_number(aj), format_number(b[j]) if j < len(b) else ""])
    sys.stdout.write(buffer.getvalue())
    return EXIT_OK


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abfode",
        description="Fractional initial value problems with the "
        "Atangana-Baleanu derivative (Caputo sense).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a problem and write a CSV trajectory")
    _add_problem_arguments(solve)
    solve.add_argument("--list", action="store_true", help="list built-in problems")
    solve.add_argument("--with-exact", action="store_true", help="add closed-form columns")
    solve.add_argument(
        "--with-classical", action="store_true", help="add integer-order reference columns"
    )
    solve.add_argument("--with-predictor", action="store_true", help="add predictor columns")
    solve.set_defaults(func=cmd_solve)

    table = sub.add_parser("table", help="print the predictor/corrector tables of an example")
    table.add_argument("example", choices=sorted(TABLE_EXAMPLES))
    table.set_defaults(func=cmd_table)

    ml = sub.add_parser("ml", help="evaluate the Mittag-Leffler function E_alpha(z)")
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--z", type=float, required=True)
    ml.set_defaults(func=cmd_ml)

    compare = sub.add_parser("compare", help="solve for several orders side by side")
    _add_problem_arguments(compare)
    compare.add_argument("--alphas", type=_float_list, required=True)
    compare.add_argument(
        "--classical",
        "--with-classical",
        dest="classical",
        action="store_true",
        help="add the integer-order reference",
    )
    compare.set_defaults(func=cmd_compare)

    weights = sub.add_parser("weights", help="print the product-integration weights")
    weights.add_argument("--alpha", type=float, required=True)
    weights.add_argument("--n", type=int, required=True)
    weights.set_defaults(func=cmd_weights)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        return args.func(args)
    except (UsageError, DomainError, IndexError) as exc:
        print(f"abfode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImplicitSolveError, NonConvergenceError, ArithmeticError) as exc:
        print(f"abfode: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"abfode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
