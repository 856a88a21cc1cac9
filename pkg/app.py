# Command-line front end for the Segre averaging engine

import argparse
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from modules.analysis_module import (
    equal_on_X,
    flatten_search,
    is_holomorphic_restriction,
    is_real_valued,
    reconstruct_model,
)
from modules.averaging_module import (
    RSeriesTable,
    average,
    generating_series_check,
    r_table,
    raverage,
    reduce,
)
from modules.model_module import (
    ModelHypersurface,
    fiber_data,
    load_model_config,
    model_to_config,
    standard_defining_equations,
)
from modules.series_module import dumps_series, parse_expression
from utilities.config import (
    DEFAULT_GENFUN_ORDER,
    DEFAULT_JOBS,
    DEFAULT_ORDER_FACTOR,
    EXIT_FAILS,
    EXIT_OK,
    EXIT_USAGE,
)
from utilities.logger import emit_log, set_level
from utilities.report_utils import dumps_json, load_json, load_series_file, write_json

COMMANDS = (
    "average", "raverage", "reduce", "holo-test", "equal-test", "flatten-test",
    "flatten-search", "reconstruct", "rtable", "genfun-check", "defeq",
)


class UsageError(ValueError):
    pass


# === Requests ===

@dataclass
class CommandRequest:
    command: str
    model_path: Optional[str] = None
    inputs: List[Tuple[str, str]] = field(default_factory=list)
    order: Optional[int] = None
    degree_bound: Optional[int] = None
    s_order: int = DEFAULT_GENFUN_ORDER
    k: Optional[int] = None
    rtable_path: Optional[str] = None
    json_path: Optional[str] = None
    jobs: int = DEFAULT_JOBS
    conjugate: bool = False


@dataclass
class CommandResult:
    status: int
    text: str
    report: dict


def _tagged(kind):
    return lambda value: (kind, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segre-average",
        description="Exact Segre-fiber averaging for model surfaces w = p(z, zbar).",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", dest="model_path", help="model config (JSON)")
    parser.add_argument("--series", dest="inputs", action="append", type=_tagged("series"), default=[],
                        help="series file; repeat for equal-test")
    parser.add_argument("--monomial", dest="inputs", action="append", type=_tagged("expr"),
                        help="expression such as 'zbar^2' or 'w + z^2'")
    parser.add_argument("-N", "--order", type=int, help="truncation order (default 2k)")
    parser.add_argument("-D", "--degree", dest="degree_bound", type=int, help="degree bound for rtable/flatten-search")
    parser.add_argument("-M", dest="s_order", type=int, default=DEFAULT_GENFUN_ORDER, help="s-order for genfun-check")
    parser.add_argument("-k", type=int, help="Segre degree for reconstruct")
    parser.add_argument("--rtable", dest="rtable_path", help="R-table JSON for reconstruct")
    parser.add_argument("--json", dest="json_path", help="also write the report as JSON")
    parser.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="workers for independent checks")
    parser.add_argument("--conjugate", action="store_true", help="defeq: print the unbarred equations")
    parser.add_argument("--log-level", choices=("quiet", "info", "debug"), help="overrides SEGRE_AVERAGE_LOG")
    return parser


# === Helpers ===

def _load_inputs(request: CommandRequest, signature, order, count):
    if len(request.inputs) != count:
        raise UsageError(f"{request.command} takes {count} input(s) via --series/--monomial, got {len(request.inputs)}")
    out = []
    for kind, value in request.inputs:
        if kind == "series":
            out.append(load_series_file(value, signature, order))
        else:
            out.append(parse_expression(value, signature, order))
    return out


def _verdict_result(verdict) -> CommandResult:
    if verdict.holds:
        lines = [f"{verdict.check}: holds to order {verdict.order}"]
        if verdict.extension is not None:
            lines.append(f"extension: {verdict.extension}")
        status = EXIT_OK
    else:
        lines = [f"{verdict.check}: fails at ell = {verdict.ell} (order {verdict.order})",
                 f"discrepancy: {verdict.discrepancy}"]
        status = EXIT_FAILS
    return CommandResult(status, "\n".join(lines), verdict.to_dict())


def _series_result(label, series) -> CommandResult:
    return CommandResult(EXIT_OK, str(series), {"command": label, "series": dumps_series(series)})


# === Dispatch ===

def run(request: CommandRequest) -> CommandResult:
    if request.command not in COMMANDS:
        raise UsageError(f"unknown command {request.command!r}")
    if request.jobs < 1:
        raise UsageError("--jobs must be at least 1")

    if request.command == "reconstruct":
        if not request.rtable_path:
            raise UsageError("reconstruct needs --rtable")
        table = RSeriesTable.from_dict(load_json(request.rtable_path))
        model = reconstruct_model(table, request.k)
        config = model_to_config(model)
        return CommandResult(EXIT_OK, dumps_json(config).rstrip("\n"), config)

    if not request.model_path:
        raise UsageError(f"{request.command} needs --model")
    model = load_model_config(request.model_path)
    k = model.multiplicity
    N = request.order if request.order is not None else DEFAULT_ORDER_FACTOR * k
    if N < k:
        raise UsageError(f"order {N} is below the Segre multiplicity {k}")
    fd = fiber_data(model, N)
    sig, hol = fd.signature, fd.holomorphic
    emit_log(f"[CLI] {request.command} on {model.describe()} at order {N}")

    if request.command == "average":
        (f,) = _load_inputs(request, sig, N, 1)
        return _series_result("average", average(f, fd, N))

    if request.command == "raverage":
        (g,) = _load_inputs(request, sig, N, 1)
        return _series_result("raverage", raverage(g, fd, N))

    if request.command == "reduce":
        (f,) = _load_inputs(request, sig, N, 1)
        rep = reduce(f, fd, N)
        report = {"command": "reduce",
                  "coefficients": [dumps_series(c) for c in rep.coefficients]}
        return CommandResult(EXIT_OK, str(rep), report)

    if request.command == "holo-test":
        (f,) = _load_inputs(request, sig, N, 1)
        return _verdict_result(is_holomorphic_restriction(f, fd, N, request.jobs))

    if request.command == "equal-test":
        f, g = _load_inputs(request, sig, N, 2)
        return _verdict_result(equal_on_X(f, g, fd, N, request.jobs))

    if request.command == "flatten-test":
        (f,) = _load_inputs(request, hol, N, 1)
        return _verdict_result(is_real_valued(f, fd, N, request.jobs))

    if request.command == "flatten-search":
        D = request.degree_bound if request.degree_bound is not None else 2 * k
        result = flatten_search(fd, D, N, request.jobs)
        lines = [f"theta candidates: {', '.join(str(c.generator) for c in result.theta_candidates) or 'none'}",
                 "linear basis:"]
        lines += [f"  {f}" for f in result.linear_basis]
        lines.append("verified:")
        lines += [f"  {f}" for f in result.verified]
        return CommandResult(EXIT_OK, "\n".join(lines), result.to_dict())

    if request.command == "rtable":
        D = request.degree_bound if request.degree_bound is not None else N
        table = r_table(fd, D, N, request.jobs)
        lines = [f"R(zbar^{a} wbar^{b}) = {s}" for (a, b), s in sorted(table.entries.items())]
        if isinstance(model, ModelHypersurface):
            bad = table.leading_term_violations(model)
            lines.append(f"leading-term law: {'ok' if not bad else 'violated at ' + str(bad)}")
        return CommandResult(EXIT_OK, "\n".join(lines), table.to_dict())

    if request.command == "genfun-check":
        report = generating_series_check(fd, N, request.s_order)
        lines = [f"s^{a}: {report.left[a]}" for a in sorted(report.left)]
        lines.append("generating identity: " + ("agrees" if report.agrees else f"mismatch at {report.mismatches}"))
        if report.printed_form_agrees is not None:
            lines.append("printed quadric form: " + ("agrees" if report.printed_form_agrees
                                                     else f"differs at s-powers {report.printed_form_mismatches}"))
        return CommandResult(EXIT_OK if report.agrees else EXIT_FAILS, "\n".join(lines), report.to_dict())

    # defeq
    equations = standard_defining_equations(fd, N)
    if request.conjugate:
        equations = equations.conjugate_form()
    lines = [f"Phi{gamma} = {phi}" for gamma, phi in equations.items()]
    report = {"command": "defeq", "barred": equations.barred,
              "equations": [{"gamma": list(gamma), "series": dumps_series(phi)} for gamma, phi in equations.items()]}
    return CommandResult(EXIT_OK, "\n".join(lines), report)


# === Entry Point ===

def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.log_level:
        set_level(args.log_level)

    request = CommandRequest(
        command=args.command, model_path=args.model_path, inputs=list(args.inputs or []),
        order=args.order, degree_bound=args.degree_bound, s_order=args.s_order, k=args.k,
        rtable_path=args.rtable_path, json_path=args.json_path, jobs=args.jobs, conjugate=args.conjugate,
    )
    try:
        result = run(request)
        if request.json_path:
            write_json(request.json_path, result.report)
    except (ValueError, OSError, KeyError) as e:
        emit_log(f"[CLI] {request.command} failed: {e}")
        return EXIT_USAGE

    print(result.text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
