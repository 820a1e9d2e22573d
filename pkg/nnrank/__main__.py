import argparse
import sys
import typing

from enum import IntEnum
from fractions import Fraction
from rich.console import Console

from nnrank.compiler.compile import compile_take1, compile_take2, polynomial_counts
from nnrank.compiler.polynomial import Mode
from nnrank.engine.config import AnchorPolicy, DecisionConfig, resolve_seed
from nnrank.engine.decide import Verdict, decide_rank_plus
from nnrank.errors import FactorizationError, NNRankError, RecoveryError
from nnrank.exact.matrix import max_bit_length
from nnrank.exact.scalar import parse_scalar
from nnrank.factor.core import Factorization, is_stable
from nnrank.factor.ensemble import Verdict as PredicateVerdict
from nnrank.factor.ensemble import (
    build_ensemble,
    build_row_ensemble,
    evaluate_predicate,
    extract_factorization,
    recover_factor
)
from nnrank.factor.stabilizer import stabilize
from nnrank.fragile.bundle import FragileBundle
from nnrank.fragile.certificate import block_certificate, submatrix_certificate
from nnrank.fragile.geometry import gen_triangle_family, hexagram_family
from nnrank.fragile.instance import block_compose, build_instance, verify_no_premises
from nnrank.io.matrix_file import read_matrix, write_matrix
from nnrank.io.poly_file import write_poly_system
from nnrank.io.report import RunReport
from nnrank.utils.time_measure import TimeMeasure


console = Console(stderr=True)


class ExitCode(IntEnum):
    SUCCESS = 0
    NO = 1
    UNKNOWN = 2
    ERROR = 3


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with the dedicated exit code"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.ERROR, f"{self.prog}: error: {message}\n")


def _parse_index_list(text: typing.Optional[str]) -> typing.Tuple[int, ...]:
    if text is None or text.strip() == "":
        return ()
    return tuple(int(value) for value in text.split(","))


def _emit(report: RunReport, args: argparse.Namespace) -> None:
    sys.stdout.write(report.render())
    if getattr(args, "report", None):
        report.save(args.report)


def _load_factorization(args: argparse.Namespace, report: RunReport):
    A = read_matrix(args.matrix_a)
    W = read_matrix(args.matrix_w)
    factorization = Factorization(A, W)
    M = read_matrix(args.matrix) if args.matrix else factorization.product()

    report.inputs.update({"matrix_a": args.matrix_a, "matrix_w": args.matrix_w, "matrix": args.matrix or "A*W"})
    report.bit_lengths.update({"A": max_bit_length(A), "W": max_bit_length(W), "M": max_bit_length(M)})
    return M, factorization


def _run_stabilize(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="stabilize")
    M, factorization = _load_factorization(args, report)

    measure = TimeMeasure()
    with console.status("Stabilizing factorization..."):
        result, trace = stabilize(M, factorization)
    report.timings["stabilize"] = measure()

    write_matrix(args.out_a, result.A)
    write_matrix(args.out_w, result.W)

    report.outcome = "stable"
    report.details.update({"updates": str(len(trace)), "rounds": str(trace.rounds)})
    report.bit_lengths.update({"out_a": max_bit_length(result.A), "out_w": max_bit_length(result.W)})
    _emit(report, args)
    return ExitCode.SUCCESS


def _run_check_stable(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="check-stable")
    M, factorization = _load_factorization(args, report)

    try:
        stable = is_stable(M, factorization)
    except FactorizationError:
        report.outcome = "invalid"
        _emit(report, args)
        return ExitCode.NO

    report.outcome = "stable" if stable else "not-stable"
    _emit(report, args)
    return ExitCode.SUCCESS if stable else ExitCode.NO


def _run_recover(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="recover")
    M = read_matrix(args.matrix)
    report.inputs["matrix"] = args.matrix
    if (args.matrix_a is None) == (args.matrix_w is None):
        raise ValueError("Pass exactly one of --matrix-a and --matrix-w")

    if args.matrix_a is not None:
        report.inputs["matrix_a"] = args.matrix_a
        ensemble = build_ensemble(read_matrix(args.matrix_a))
    else:
        report.inputs["matrix_w"] = args.matrix_w
        ensemble = build_row_ensemble(read_matrix(args.matrix_w))

    try:
        recovered = recover_factor(M, ensemble)
    except RecoveryError as e:
        report.outcome = "FAIL"
        report.details.update({"index": str(e.index), "reason": e.reason})
        _emit(report, args)
        return ExitCode.NO

    write_matrix(args.out, recovered)
    report.outcome = "recovered"
    report.details["ensemble_size"] = str(ensemble.size)
    report.bit_lengths["out"] = max_bit_length(recovered)
    _emit(report, args)
    return ExitCode.SUCCESS


def _run_check_predicate(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="check-predicate")
    M, factorization = _load_factorization(args, report)

    column_side = build_ensemble(factorization.A)
    row_side = build_row_ensemble(factorization.W)
    predicate = evaluate_predicate(M, column_side, row_side)

    report.outcome = predicate.verdict.value
    report.details.update({"p": str(column_side.size), "q": str(row_side.size)})
    for (i, j), reason in sorted(predicate.failures.items()):
        report.details[f"cell.{i}.{j}"] = reason.value

    if predicate.verdict is PredicateVerdict.PASS and args.out_a and args.out_w:
        extracted = extract_factorization(M, column_side, row_side, predicate)
        write_matrix(args.out_a, extracted.A)
        write_matrix(args.out_w, extracted.W)

    _emit(report, args)
    return ExitCode.SUCCESS if predicate.verdict is PredicateVerdict.PASS else ExitCode.NO


def _compile(args: argparse.Namespace, report: RunReport):
    M = read_matrix(args.matrix)
    U = _parse_index_list(args.anchor_rows) or tuple(range(args.s))
    V = _parse_index_list(args.anchor_cols) or tuple(range(args.t))
    report.inputs.update({"matrix": args.matrix, "rank": str(args.rank), "mode": args.mode,
                          "s": str(args.s), "t": str(args.t),
                          "U": ",".join(map(str, U)), "V": ",".join(map(str, V))})
    report.bit_lengths["M"] = max_bit_length(M)

    measure = TimeMeasure()
    with console.status(f"Compiling {args.mode} system..."):
        if Mode(args.mode) is Mode.TAKE1:
            system = compile_take1(M, args.rank, args.s, args.t, U, V, args.p, args.q)
        else:
            system = compile_take2(M, args.rank, args.s, args.t, U, V)
    report.timings["compile"] = measure()

    report.details["var_count"] = str(system.var_count)
    report.details["max_degree"] = str(system.max_degree)
    for family, count in polynomial_counts(system).items():
        report.details[f"count.{family}"] = str(count)
    return system


def _run_compile(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="compile")
    _compile(args, report)
    report.outcome = "compiled"
    _emit(report, args)
    return ExitCode.SUCCESS


def _run_export(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="export")
    system = _compile(args, report)
    write_poly_system(args.out, system)
    report.outcome = "exported"
    report.details["out"] = args.out
    _emit(report, args)
    return ExitCode.SUCCESS


def _run_decide(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="decide")
    M = read_matrix(args.matrix)
    cfg = DecisionConfig(budget_seconds=args.budget_seconds,
                         starts=args.starts,
                         anchor_policy=AnchorPolicy(args.anchor_policy),
                         seed=resolve_seed(args.seed),
                         process_num=args.process_num)
    report.inputs.update({"matrix": args.matrix, "rank": str(args.rank), "seed": str(cfg.seed),
                          "budget_seconds": str(cfg.budget_seconds), "starts": str(cfg.starts)})
    report.bit_lengths["M"] = max_bit_length(M)

    measure = TimeMeasure()
    outcome = decide_rank_plus(M, args.rank, cfg)
    report.timings["decide"] = measure()

    report.outcome = outcome.verdict.value
    report.details["provenance"] = outcome.provenance.value
    if outcome.certificate is not None:
        report.bit_lengths["certificate"] = max(max_bit_length(outcome.certificate.A),
                                                max_bit_length(outcome.certificate.W))
        if args.out_a and args.out_w:
            write_matrix(args.out_a, outcome.certificate.A)
            write_matrix(args.out_w, outcome.certificate.W)

    _emit(report, args)
    return {Verdict.YES: ExitCode.SUCCESS, Verdict.NO: ExitCode.NO, Verdict.UNKNOWN: ExitCode.UNKNOWN}[outcome.verdict]


def _run_fragile_gen(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="fragile gen")
    if not args.hexagram and args.n is None and not args.params:
        raise ValueError("fragile gen needs --n, --params or --hexagram")

    if args.hexagram:
        triangles = hexagram_family()
    else:
        params = [Fraction(parse_scalar(value)) for value in args.params.split(",")] if args.params \
            else [Fraction(i, 2 * args.n) for i in range(args.n)]
        if args.n is not None and len(params) != args.n:
            raise ValueError(f"--n {args.n} doesn't match {len(params)} parameters")
        triangles = gen_triangle_family(params)
    report.inputs.update({"n": str(len(triangles)), "params": args.params or "", "hexagram": str(args.hexagram)})

    measure = TimeMeasure()
    inst = build_instance(triangles)
    premises = verify_no_premises(inst)
    report.timings["build"] = measure()

    bundle = FragileBundle.create(args.out, bundle_clear=True)
    bundle.save(inst, premises)
    if args.blocks > 1:
        write_matrix(bundle.file("M_blocks.mat"), block_compose(inst, args.blocks))

    report.outcome = "pass" if premises.passed else "fail"
    report.details.update({"epsilon": str(inst.epsilon), "points": str(len(inst.points)), "out": args.out})
    report.bit_lengths["M"] = max_bit_length(inst.M)
    _emit(report, args)
    return ExitCode.SUCCESS if premises.passed else ExitCode.NO


def _run_fragile_verify(args: argparse.Namespace) -> ExitCode:
    report = RunReport(command="fragile verify")
    report.inputs.update({"bundle": args.bundle, "rows": args.rows or "", "blocks": str(args.blocks)})

    inst = FragileBundle(args.bundle).load()
    premises = verify_no_premises(inst)
    for name, passed in premises.items():
        report.details[f"premise.{name}"] = "pass" if passed else "fail"

    rows = _parse_index_list(args.rows)
    if args.blocks > 1:
        certificate = block_certificate(inst, args.blocks, rows)
        report.details["certificate"] = "none" if certificate is None else "verified"
    else:
        certificate = submatrix_certificate(inst, rows)
        report.details["certificate"] = "none" if certificate is None else f"triangle {certificate.triangle}"

    report.outcome = "pass" if premises.passed else "fail"
    _emit(report, args)
    return ExitCode.SUCCESS if premises.passed else ExitCode.NO


def _add_factor_args(parser: argparse.ArgumentParser, outputs: bool = False):
    parser.add_argument("--matrix", type=str, default=None, help="Matrix M, defaults to A*W")
    parser.add_argument("--matrix-a", dest="matrix_a", type=str, required=True, help="Left factor A")
    parser.add_argument("--matrix-w", dest="matrix_w", type=str, required=True, help="Right factor W")
    if outputs:
        parser.add_argument("--out-a", dest="out_a", type=str, default=None, help="Output path of A")
        parser.add_argument("--out-w", dest="out_w", type=str, default=None, help="Output path of W")


def _add_compile_args(parser: argparse.ArgumentParser):
    parser.add_argument("--matrix", type=str, required=True, help="Matrix M")
    parser.add_argument("--rank", type=int, required=True, help="Inner dimension r")
    parser.add_argument("--mode", type=str, default=Mode.TAKE2.value, choices=[mode.value for mode in Mode],
                        help="System construction")
    parser.add_argument("--s", type=int, required=True, help="Guessed rank of A")
    parser.add_argument("--t", type=int, required=True, help="Guessed rank of W")
    parser.add_argument("--anchor-rows", dest="anchor_rows", type=str, default=None,
                        help="Comma separated anchor rows U, defaults to the first s rows")
    parser.add_argument("--anchor-cols", dest="anchor_cols", type=str, default=None,
                        help="Comma separated anchor columns V, defaults to the first t columns")
    parser.add_argument("--p", type=int, default=1, help="Number of column transforms (take1)")
    parser.add_argument("--q", type=int, default=1, help="Number of row transforms (take1)")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="nnrank", description="Exact tools around the nonnegative rank of a matrix")
    parser.add_argument("--report", type=str, default=None, help="Also write the run report to this file")
    subparsers = parser.add_subparsers(title="Commands", required=True)

    stabilize_parser = subparsers.add_parser("stabilize", help="Rewrites a factorization into a stable one")
    _add_factor_args(stabilize_parser)
    stabilize_parser.add_argument("--out-a", dest="out_a", type=str, required=True, help="Output path of A")
    stabilize_parser.add_argument("--out-w", dest="out_w", type=str, required=True, help="Output path of W")
    stabilize_parser.set_defaults(func=_run_stabilize)

    check_parser = subparsers.add_parser("check-stable", help="Checks whether a factorization is stable")
    _add_factor_args(check_parser)
    check_parser.set_defaults(func=_run_check_stable)

    recover_parser = subparsers.add_parser("recover", help="Recovers one factor from M and the other factor")
    recover_parser.add_argument("--matrix", type=str, required=True, help="Matrix M")
    recover_parser.add_argument("--matrix-a", dest="matrix_a", type=str, default=None, help="Recover W from A")
    recover_parser.add_argument("--matrix-w", dest="matrix_w", type=str, default=None, help="Recover A from W")
    recover_parser.add_argument("--out", type=str, required=True, help="Output path of the recovered factor")
    recover_parser.set_defaults(func=_run_recover)

    predicate_parser = subparsers.add_parser("check-predicate", help="Evaluates the predicate on the ensembles of A, W")
    _add_factor_args(predicate_parser, outputs=True)
    predicate_parser.set_defaults(func=_run_check_predicate)

    compile_parser = subparsers.add_parser("compile", help="Compiles the polynomial system of a guess")
    _add_compile_args(compile_parser)
    compile_parser.set_defaults(func=_run_compile)

    export_parser = subparsers.add_parser("export", help="Writes the polynomial system of a guess")
    _add_compile_args(export_parser)
    export_parser.add_argument("--out", type=str, required=True, help="Output path of the system")
    export_parser.set_defaults(func=_run_export)

    decide_parser = subparsers.add_parser("decide", help="Decides whether rank+(M) <= r")
    decide_parser.add_argument("--matrix", type=str, required=True, help="Matrix M")
    decide_parser.add_argument("--rank", type=int, required=True, help="Target rank r")
    decide_parser.add_argument("--budget-seconds", dest="budget_seconds", type=float, default=60.0,
                               help="Wall-clock budget of the numeric search")
    decide_parser.add_argument("--starts", type=int, default=8, help="Numeric multistarts")
    decide_parser.add_argument("--seed", type=int, default=None, help="Random seed, falls back to NNR_SEED")
    decide_parser.add_argument("--anchor-policy", dest="anchor_policy", type=str, default=AnchorPolicy.AUTO.value,
                               choices=[policy.value for policy in AnchorPolicy], help="Anchor enumeration")
    decide_parser.add_argument("--process-num", dest="process_num", type=int, default=1,
                               help="Number of parallel processes")
    decide_parser.add_argument("--out-a", dest="out_a", type=str, default=None, help="Certificate A output")
    decide_parser.add_argument("--out-w", dest="out_w", type=str, default=None, help="Certificate W output")
    decide_parser.set_defaults(func=_run_decide)

    fragile_parser = subparsers.add_parser("fragile", help="Fragile instances")
    fragile_subparsers = fragile_parser.add_subparsers(title="Fragile commands", required=True)

    gen_parser = fragile_subparsers.add_parser("gen", help="Generates a fragile instance bundle")
    gen_parser.add_argument("--n", type=int, default=None, help="Number of triangles")
    gen_parser.add_argument("--params", type=str, default=None, help="Comma separated rational tangent parameters")
    gen_parser.add_argument("--hexagram", action="store_true", help="Generate the two-triangle hexagram")
    gen_parser.add_argument("--blocks", type=int, default=1, help="Also write the block-diagonal composition")
    gen_parser.add_argument("--out", type=str, required=True, help="Bundle directory")
    gen_parser.set_defaults(func=_run_fragile_gen)

    verify_parser = fragile_subparsers.add_parser("verify", help="Verifies a bundle and certifies a row subset")
    verify_parser.add_argument("bundle", type=str, help="Bundle directory")
    verify_parser.add_argument("--rows", type=str, default=None, help="Comma separated rows to certify")
    verify_parser.add_argument("--blocks", type=int, default=1, help="Rows index the block composition")
    verify_parser.set_defaults(func=_run_fragile_verify)

    return parser


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else int(ExitCode.SUCCESS)

    try:
        return int(args.func(args))
    except (OSError, ValueError, NNRankError) as e:
        console.log(f"[red]Error[/red]: {e}")
        return int(ExitCode.ERROR)


if __name__ == "__main__":
    sys.exit(main())
