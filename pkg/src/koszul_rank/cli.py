"""Command-line surface: bounds, crossover, flatten, certify, verify, keylemma.

Every command takes --seed (default 0) and echoes it in the output; identical
invocations produce byte-identical output.  Table formats: md (default), csv,
json.  Exit codes: 0 success, 1 check failure, 2 input error, 3 degenerate
computation.  KOSZUL_RANK_THREADS caps internal trial parallelism.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bounds import (
    BoundKind,
    DegenerateSubspaceError,
    best_mr,
    bound_value,
    certify_border_rank,
    crossover,
)
from .exact_linalg import ExactMatrix, matrix_to_json, random_int_matrix, vector_to_json
from .flattening import (
    assemble,
    commutator_matrix,
    commutator_pattern,
    dump_symbolic,
    flattening_pattern,
)
from .keylemma import KeyLemmaStageError, key_lemma_search
from .suites import suite_detlemmas, suite_p2, suite_p3, suite_remark, suite_strassen
from .tensor_core import SliceFamily, matmul_tensor, tensor_from_json

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_DEGENERATE = 3


def _fmt_value(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "-"
    return str(x)


def _render_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str, seed: int, notes: Sequence[str] = ()) -> str:
    if fmt == "json":
        payload = {
            "seed": seed,
            "columns": list(columns),
            "rows": [[_fmt_value(x) for x in row] for row in rows],
            "notes": list(notes),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt_value(x) for x in row) for row in rows]
        lines += [f"# {note}" for note in notes]
        lines.append(f"# seed {seed}")
        return "\n".join(lines) + "\n"
    body = [_fmt_value(x) for x in columns]
    cells = [[_fmt_value(x) for x in row] for row in rows]
    widths = [max(len(body[j]), *(len(r[j]) for r in cells)) if cells else len(body[j]) for j in range(len(columns))]
    lines = [
        "| " + " | ".join(body[j].ljust(widths[j]) for j in range(len(columns))) + " |",
        "| " + " | ".join("-" * widths[j] for j in range(len(columns))) + " |",
    ]
    for r in cells:
        lines.append("| " + " | ".join(r[j].ljust(widths[j]) for j in range(len(columns))) + " |")
    lines.extend(notes)
    lines.append(f"seed: {seed}")
    return "\n".join(lines) + "\n"


def _emit(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="root seed (echoed in output)")
    parser.add_argument("--format", choices=("md", "csv", "json"), default="md")
    parser.add_argument("--output", default="-", help="output path, '-' for stdout")


def _cmd_bounds(args) -> int:
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)
    rows = []
    skipped = []
    kinds: list[BoundKind] = [BoundKind("strassen"), BoundKind("blaser")]
    kinds += [BoundKind("landsberg", p) for p in range(1, args.p + 1)]
    kinds += [BoundKind("mr", p) for p in range(1, args.p + 1)]
    kinds += [BoundKind("mr_p2_refined"), BoundKind("mr_p3_refined")]
    for kind in kinds:
        try:
            report = bound_value(kind, args.n, args.m)
        except ValueError:
            skipped.append(str(kind))  # square-only kind at a rectangular shape
            continue
        rows.append(
            [kind.tag, report.n, report.m, kind.p, report.value, report.ceiling, report.vacuous]
        )
    p_star, best = best_mr(args.n)
    notes = [f"best mr p at n={args.n}: p={p_star} ceiling={best.ceiling}"]
    if skipped:
        notes.append("skipped (square-only at m != n): " + ", ".join(skipped))
    text = _render_table(
        ["kind", "n", "m", "p", "value", "ceiling", "vacuous"], rows, args.format, args.seed, notes
    )
    _emit(text, args.output)
    return EXIT_OK


def _cmd_crossover(args) -> int:
    try:
        kind_a = BoundKind.parse(args.a)
        kind_b = BoundKind.parse(args.b)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    report = crossover(kind_a, kind_b, args.n_max)
    notes = []
    pair = {str(kind_a), str(kind_b)}
    if pair == {"mr:3", "blaser"}:
        notes.append(
            "note: the closed forms cross at 92; a commonly quoted threshold "
            "for this comparison is 132 (documented discrepancy)"
        )
    rows = [[
        str(kind_a), str(kind_b), report.n_max, report.first_geq, report.first_strict,
        report.first_geq_ceiling, report.first_strict_ceiling, report.monotone_after,
    ]]
    text = _render_table(
        ["a", "b", "n_max", "first_geq", "first_strict", "first_geq_ceiling",
         "first_strict_ceiling", "monotone_after"],
        rows, args.format, args.seed, notes,
    )
    _emit(text, args.output)
    return EXIT_OK


def _cmd_flatten(args) -> int:
    if args.p < 1:
        print("error: p must be >= 1", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.numeric:
        n = args.n
        if n < 1:
            print("error: --numeric needs --n >= 1", file=sys.stderr)
            return EXIT_INPUT_ERROR
        rng = random.Random(args.seed)
        xs = tuple(random_int_matrix(rng, n, n) for _ in range(2 * args.p))
        family = SliceFamily(args.p, n, n, (ExactMatrix.identity(n), *xs))
        if args.commutators:
            _, numeric = commutator_matrix(family)
        else:
            sym, _ = flattening_pattern(args.p, block_size=n)
            numeric = assemble(sym, family)
        payload = {"seed": args.seed, "p": args.p, "n": n, "matrix": matrix_to_json(numeric)}
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
        return EXIT_OK
    if args.commutators:
        sym = commutator_pattern(args.p)
    else:
        sym, _ = flattening_pattern(args.p)
    _emit(dump_symbolic(sym, signed=not args.unsigned), args.output)
    return EXIT_OK


def _cmd_certify(args) -> int:
    if args.tensor:
        try:
            with open(args.tensor, "r", encoding="utf-8") as handle:
                tensor = tensor_from_json(json.load(handle))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"error: cannot read tensor file: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    elif args.matmul:
        try:
            n, l, m = (int(x) for x in args.matmul.split(","))
            tensor = matmul_tensor(n, l, m)
        except ValueError as exc:
            print(f"error: bad --matmul spec: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    else:
        print("error: need --tensor FILE or --matmul n,l,m", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        certificate = certify_border_rank(tensor, args.p, seed=args.seed, trials=args.trials)
    except DegenerateSubspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    payload = {
        "bound": certificate.bound,
        "flattening_rank": certificate.flattening_rank,
        "divisor": certificate.divisor,
        "p": certificate.p,
        "seed": certificate.seed,
        "trials": certificate.trials,
        "trial_ranks": list(certificate.trial_ranks),
        "alphas": [vector_to_json(a) for a in certificate.alphas],
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    n_values = (args.n,) if args.n else None
    if args.suite == "strassen":
        checks = suite_strassen(n_values or (2, 3, 4), args.trials or 30, args.seed)
    elif args.suite == "p2":
        checks = suite_p2(n_values or (2, 3), args.trials or 10, args.seed)
    elif args.suite == "p3":
        checks = suite_p3()
    elif args.suite == "remark-imp":
        checks = suite_remark((args.p,) if args.p else (2, 3, 4))
    elif args.suite == "detlemmas":
        checks = suite_detlemmas(args.trials or 50, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        return EXIT_INPUT_ERROR
    if args.format == "json":
        payload = {
            "seed": args.seed,
            "suite": args.suite,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
            ],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    else:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks
        ]
        lines.append(f"seed: {args.seed}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def _cmd_keylemma(args) -> int:
    try:
        witness = key_lemma_search(args.n, args.p, seed=args.seed)
    except (KeyLemmaStageError, NotImplementedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    payload = {
        "n": witness.n,
        "p": witness.p,
        "seed": witness.seed,
        "supports": {
            "s0": list(witness.support0),
            "s1": list(witness.support1),
            "s2": list(witness.support2),
            "s3": list(witness.support3),
        },
        "union_size": witness.union_size,
        "h_achieved": witness.h_achieved,
        "h_required": witness.h_required,
        "grid_det": _fmt_value(witness.grid_det),
        "alphas": [matrix_to_json(a) for a in witness.alphas],
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koszul-rank",
        description="Flattening-based rank lower bounds for matrix multiplication tensors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="table of all bound formulas at n")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--m", type=int, default=None)
    p_bounds.add_argument("--p", type=int, default=3, help="max p for parametric kinds")
    _add_common(p_bounds)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_cross = sub.add_parser("crossover", help="first n where bound a >= bound b")
    p_cross.add_argument("--a", required=True, help="bound kind, e.g. mr:3")
    p_cross.add_argument("--b", required=True)
    p_cross.add_argument("--n-max", type=int, default=1000)
    _add_common(p_cross)
    p_cross.set_defaults(func=_cmd_crossover)

    p_flat = sub.add_parser("flatten", help="dump symbolic or numeric flattening")
    p_flat.add_argument("--p", type=int, required=True)
    p_flat.add_argument("--commutators", action="store_true", help="dump the commutator grid")
    p_flat.add_argument("--unsigned", action="store_true", help="omit signs in tokens")
    p_flat.add_argument("--numeric", action="store_true", help="assemble random integer slices")
    p_flat.add_argument("--n", type=int, default=0, help="slice size for --numeric")
    _add_common(p_flat)
    p_flat.set_defaults(func=_cmd_flatten)

    p_cert = sub.add_parser("certify", help="border-rank certificate for a tensor")
    p_cert.add_argument("--tensor", help="tensor JSON file")
    p_cert.add_argument("--matmul", help="n,l,m shorthand instead of a file")
    p_cert.add_argument("--p", type=int, required=True)
    p_cert.add_argument("--trials", type=int, default=3)
    _add_common(p_cert)
    p_cert.set_defaults(func=_cmd_certify)

    p_verify = sub.add_parser("verify", help="run a seeded identity suite")
    p_verify.add_argument(
        "--suite", required=True, choices=("strassen", "p2", "p3", "remark-imp", "detlemmas")
    )
    p_verify.add_argument("--n", type=int, default=0)
    p_verify.add_argument("--p", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=0)
    _add_common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_key = sub.add_parser("keylemma", help="run the staged witness pipeline")
    p_key.add_argument("--n", type=int, required=True)
    p_key.add_argument("--p", type=int, required=True)
    _add_common(p_key)
    p_key.set_defaults(func=_cmd_keylemma)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
