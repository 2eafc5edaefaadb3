from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

ROOT_DIR = Path(__file__).resolve().parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from k3curves import get_logger
from k3curves.bn import UndecidedError, bn_general, oracle_bn_general
from k3curves.config import SweepSettings
from k3curves.existence import CLAUSE_MODES, bn_curve_exists, k3_curve_exists, mukai_model
from k3curves.families import FAMILY_LABELS, derived_admissible, theorem_result
from k3curves.lattice import DivisorClass, LatticeError
from k3curves.oracle import (
    OracleContext,
    OracleError,
    effectivity,
    h0,
    is_irreducible,
    is_nef,
    minus_two_classes,
)
from k3curves.render import (
    FAMILY_COLUMNS,
    OUTPUT_FORMATS,
    SURFACE_COLUMNS,
    bn_payload,
    existence_payload,
    family_payload,
    render_payload,
    render_report,
    render_rows,
    render_table,
    surface_payload,
)
from k3curves.sweeps import SweepRunner

LOGGER = get_logger()

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

SUITES = (
    "bn-residual",
    "ell-thresholds",
    "prodell",
    "subset",
    "consistency",
    "hodge",
    "stripping",
    "reductions",
    "exclusion-d",
)
ORACLE_OPS = ("effective", "nef", "h0", "irreducible", "minus-two", "bn")
TABLES = ("models", "families", "nodes")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None, help="Output format.")
    common.add_argument("--mode", choices=CLAUSE_MODES, default=None, help="Reading of the genus-9 boundary clause.")
    common.add_argument("--workers", type=int, default=None, help="Worker threads for sweeps and enumerations.")
    common.add_argument("--output", type=Path, default=None, help="Write to this file instead of stdout.")
    common.add_argument("--box", type=int, default=None, help="Upper bound for d and g in sweeps.")
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized suites.")
    common.add_argument("--timing", action="store_true", help="Include wall time in sweep reports.")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")
    return common


def _build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="k3curves",
        description="Smooth curves on K3 surfaces and on nodal Calabi-Yau threefolds.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    query = commands.add_parser("query", help="Evaluate a single point.")
    targets = query.add_subparsers(dest="target", required=True)

    surface = targets.add_parser("surface", parents=[common], help="Curve of degree d and genus g on a K3 of degree 2n.")
    surface.add_argument("--n", type=int, required=True)
    surface.add_argument("--d", type=int, required=True)
    surface.add_argument("--g", type=int, required=True)
    surface.add_argument("--bn", action="store_true", help="Also decide Brill-Noether generality of S(n, d, g).")

    fam = targets.add_parser("family", parents=[common], help="Rigid curve on a Calabi-Yau family a-k.")
    fam.add_argument("--family", choices=FAMILY_LABELS, required=True)
    fam.add_argument("--d", type=int, required=True)
    fam.add_argument("--g", type=int, required=True)

    oracle = targets.add_parser("oracle", parents=[common], help="Cone computations on S(n, d, g).")
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--d", type=int, required=True)
    oracle.add_argument("--g", type=int, required=True)
    oracle.add_argument("--op", choices=ORACLE_OPS, required=True)
    oracle.add_argument("--a", type=int, default=1, help="H coefficient of the class aH + bC.")
    oracle.add_argument("--b", type=int, default=0, help="C coefficient of the class aH + bC.")
    oracle.add_argument("--bound", type=int, default=None, help="Degree bound for minus-two.")

    curve = targets.add_parser("bn-curve", parents=[common], help="Curve on a BN general K3 of genus mu.")
    curve.add_argument("--mu", type=int, required=True)
    curve.add_argument("--d", type=int, required=True)
    curve.add_argument("--g", type=int, required=True)

    model = targets.add_parser("model", parents=[common], help="Projective model of a BN general K3.")
    model.add_argument("--mu", type=int, required=True)

    enumerate_ = commands.add_parser("enumerate", parents=[common], help="Tabulate a (d, g) box.")
    source = enumerate_.add_mutually_exclusive_group(required=True)
    source.add_argument("--family", choices=FAMILY_LABELS)
    source.add_argument("--n", type=int)
    enumerate_.add_argument("--d-max", type=int, required=True)
    enumerate_.add_argument("--g-max", type=int, required=True)

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite.")
    verify.add_argument("suite", choices=SUITES)

    tables = commands.add_parser("tables", parents=[common], help="Dump a compiled-in registry.")
    tables.add_argument("which", choices=TABLES)
    return parser


def _settings(args: argparse.Namespace) -> SweepSettings:
    return SweepSettings.from_flags(
        workers=args.workers,
        box=args.box,
        mode=args.mode,
        seed=args.seed,
        timing=args.timing,
    )


def _query(args: argparse.Namespace, settings: SweepSettings) -> dict[str, Any]:
    if args.target == "surface":
        verdict = k3_curve_exists(args.n, args.d, args.g)
        if not args.bn:
            return surface_payload(args.n, args.d, args.g, verdict)
        try:
            return surface_payload(args.n, args.d, args.g, verdict, bn=bn_general(args.n, args.d, args.g))
        except (UndecidedError, LatticeError) as exc:
            return surface_payload(args.n, args.d, args.g, verdict, bn_error=str(exc))
    if args.target == "family":
        literal = theorem_result(args.family, args.d, args.g)
        derived = derived_admissible(args.family, args.d, args.g, mode=settings.mode)
        return family_payload(args.family, args.d, args.g, literal, derived)
    if args.target == "bn-curve":
        payload: dict[str, Any] = {"query": "bn-curve", "mu": args.mu, "d": args.d, "g": args.g, "mode": settings.mode}
        payload.update(existence_payload(bn_curve_exists(args.mu, args.d, args.g, mode=settings.mode)))
        return payload
    if args.target == "model":
        found = mukai_model(args.mu)
        return {"query": "model", "mu": found.genus, "n": found.n, "model": found.model, "ambient": found.ambient}
    return _oracle_query(args)


def _oracle_query(args: argparse.Namespace) -> dict[str, Any]:
    ctx = OracleContext.for_triple(args.n, args.d, args.g)
    divisor = DivisorClass(args.a, args.b)
    payload: dict[str, Any] = {"query": "oracle", "n": args.n, "d": args.d, "g": args.g, "op": args.op}
    if args.op == "bn":
        payload.update(bn_payload(oracle_bn_general(ctx)))
        return payload
    if args.op == "minus-two":
        bound = args.bound if args.bound is not None else 2 * args.n
        payload.update({"bound": bound, "result": [str(item) for item in minus_two_classes(ctx, bound)]})
        return payload
    payload["class"] = str(divisor)
    if args.op == "effective":
        found = effectivity(ctx, divisor)
        payload.update({"result": found.effective, "reason": found.reason})
        if found.chain:
            payload["chain"] = [str(item) for item in found.chain]
    elif args.op == "nef":
        payload["result"] = is_nef(ctx, divisor)
    elif args.op == "irreducible":
        payload["result"] = is_irreducible(ctx, divisor)
    else:
        result = h0(ctx, divisor)
        payload.update({"result": result.h0, "nef_model": str(result.nef_model)})
        if result.stripped:
            payload["stripped"] = [str(item) for item in result.stripped]
    return payload


def _run(args: argparse.Namespace) -> tuple[str, int]:
    settings = _settings(args)
    if args.command == "query":
        return render_payload(_query(args, settings), args.format or "json"), EXIT_OK
    if args.command == "enumerate":
        runner = SweepRunner(settings)
        if args.family is not None:
            rows = runner.enumerate_family(args.family, args.d_max, args.g_max)
            columns = FAMILY_COLUMNS
        else:
            rows = runner.enumerate_surface(args.n, args.d_max, args.g_max)
            columns = SURFACE_COLUMNS
        return render_rows(rows, columns, args.format or "csv"), EXIT_OK
    if args.command == "verify":
        report = SweepRunner(settings).run(args.suite)
        rendered = render_report(report.to_dict(include_timing=settings.timing), args.format or "json")
        return rendered, EXIT_OK if report.passed else EXIT_FAILED
    return render_table(args.which, args.format or "text"), EXIT_OK


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8", newline="\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.quiet:
        LOGGER.setLevel(logging.WARNING)
    try:
        text, status = _run(args)
        _emit(text, args.output)
    except (ValueError, OracleError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    return status


if __name__ == "__main__":
    raise SystemExit(main())
