"""Command-line front end.

Exit codes: 0 success (decomposed, certificate issued, checks passed),
1 input or precondition error, 2 impossible, 3 unknown, 4 a ``verify``
check failed.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .canonical import rational_form, verify_rational_form
from .checks import CheckReport
from .decomp import (
    DEFAULT_SEED,
    Decomposed,
    Decomposition,
    Impossible,
    decompose,
    decomposition_kv,
    format_decomposition,
    verify_decomposition,
)
from .fields import format_field, format_poly, parse_field
from .matrices import Matrix, format_matrix, min_poly, parse_matrix
from .obstruction import PreconditionError, certify_impossible
from .oracle import MODES, InfeasibleError, SearchBudget, census

HEADER = "sqz-decomp report v1"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IMPOSSIBLE = 2
EXIT_UNKNOWN = 3
EXIT_CHECK_FAILED = 4


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error code; 2 is reserved for Impossible
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class Report:
    """Ordered key/value pairs plus free-form text blocks, rendered as text or kv."""

    def __init__(self, command: str):
        self.items: list[tuple[str, str]] = [("command", command)]
        self.blocks: list[str] = []

    def put(self, key: str, value) -> None:
        self.items.append((key, str(value)))

    def render(self, fmt: str) -> str:
        if fmt == "kv":
            return HEADER + "\n" + "".join(f"{k}={v}\n" for k, v in self.items)
        out = [HEADER]
        out += [f"{k}: {v}" for k, v in self.items]
        text = "\n".join(out) + "\n"
        return text + "".join(self.blocks)


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _inline_matrix(text: str, field: str | None) -> Matrix:
    if field is None:
        raise InputError("--matrix needs --field")
    rows = [r.split() for r in text.replace(",", " ").split(";") if r.strip()]
    body = "\n".join(" ".join(r) for r in rows)
    return parse_matrix(f"n {len(rows)} field {field}\n{body}\n")


def _load(args, path: str | None = None, inline: str | None = None) -> Matrix:
    path = path if path is not None else args.input
    inline = inline if inline is not None else args.matrix
    try:
        if inline is not None:
            A = _inline_matrix(inline, args.field)
        elif path is not None:
            A = parse_matrix(_read_text(path))
        else:
            raise InputError("no matrix given; use --input or --matrix")
        if args.field is not None and parse_field(args.field) != A.spec:
            raise InputError(f"matrix field {format_field(A.spec)} does not match --field {args.field}")
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if A.spec.p == 2:
        raise InputError("even characteristic is not supported")
    return A


def _budget(args, mode: str | None = None) -> SearchBudget:
    return SearchBudget(mode or args.mode, args.budget, args.seed)


def _checks_into(rep: Report, checks: CheckReport, prefix: str = "check") -> None:
    for name, ok in checks.checks:
        rep.put(f"{prefix}.{name}", "pass" if ok else "fail")
    rep.put("checks", "pass" if checks.ok else "fail")


def _matrix_kv(A: Matrix) -> str:
    return ";".join(",".join(str(x) for x in r) for r in A.rows)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_decompose(args) -> tuple[int, Report]:
    A = _load(args)
    rep = Report("decompose")
    rep.put("n", A.n)
    rep.put("field", format_field(A.spec))
    out = decompose(A, _budget(args))
    rep.put("outcome", out.kind)
    if isinstance(out, Decomposed):
        if args.format == "kv":
            for k, v in decomposition_kv(out.decomposition, out.checks)[2:]:
                rep.put(k, v)
        else:
            rep.blocks.append(format_decomposition(out.decomposition, out.checks))
        return (EXIT_OK if out.checks.ok else EXIT_CHECK_FAILED), rep
    if isinstance(out, Impossible):
        _certificate_into(rep, out.certificate)
        return EXIT_IMPOSSIBLE, rep
    rep.put("reason", out.reason)
    return EXIT_UNKNOWN, rep


def cmd_rcf(args) -> tuple[int, Report]:
    A = _load(args)
    R = rational_form(A)
    rep = Report("rcf")
    rep.put("n", A.n)
    rep.put("field", format_field(A.spec))
    rep.put("factors", ", ".join(format_poly(f) for f in R.factors))
    if args.format == "kv":
        rep.put("P", _matrix_kv(R.transform))
    else:
        rep.blocks.append("P =\n" + format_matrix(R.transform))
    checks = verify_rational_form(A, R)
    _checks_into(rep, checks)
    return (EXIT_OK if checks.ok else EXIT_CHECK_FAILED), rep


def cmd_verify(args) -> tuple[int, Report]:
    A = _load(args)
    if args.d is None or args.m is None:
        raise InputError("verify needs --d and --m")
    try:
        D = parse_matrix(_read_text(args.d))
        M = parse_matrix(_read_text(args.m))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if D.spec != A.spec or M.spec != A.spec or D.n != A.n or M.n != A.n:
        raise InputError("D and M must match the order and field of A")
    d = Decomposition(D, M, min_poly(D))
    checks = verify_decomposition(A, d)
    rep = Report("verify")
    rep.put("n", A.n)
    rep.put("field", format_field(A.spec))
    rep.put("min_poly_D", format_poly(d.annihilator))
    _checks_into(rep, checks)
    return (EXIT_OK if checks.ok else EXIT_CHECK_FAILED), rep


def cmd_census(args) -> tuple[int, Report]:
    if args.order is None or args.field is None:
        raise InputError("census needs --order and --field")
    try:
        F = parse_field(args.field)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if F.p == 2:
        raise InputError("even characteristic is not supported")
    if args.order < 1:
        raise InputError("--order must be positive")
    try:
        res = census(args.order, F, SearchBudget("exhaustive", args.budget, args.seed), threads=args.threads)
    except InfeasibleError as exc:
        raise InputError(str(exc)) from None
    rep = Report("census")
    rep.put("n", res.n)
    rep.put("field", format_field(F))
    rep.put("total", res.total)
    rep.put("decomposable", res.decomposable)
    rep.put("non_decomposable", res.non_decomposable)
    rep.put("classes", len(res.representatives))
    for i, (facs, size) in enumerate(zip(res.representatives, res.class_sizes)):
        rep.put(f"class.{i}.factors", ", ".join(format_poly(f) for f in facs))
        rep.put(f"class.{i}.size", size)
    return EXIT_OK, rep


def _certificate_into(rep: Report, cert) -> None:
    rep.put("polynomial", format_poly(cert.polynomial))
    rep.put("order", cert.n)
    a, b = cert.affine
    rep.put("affine", f"{a}A+{b}I")
    for name, ok in cert.checks.checks:
        rep.put(f"check.{name}", "pass" if ok else "fail")
    rep.put("evidence", cert.evidence)
    rep.put("candidates", cert.candidates)
    for note in cert.notes:
        rep.put("note", note.replace("\n", " | "))


def cmd_obstruction_check(args) -> tuple[int, Report]:
    A = _load(args)
    budget = SearchBudget("randomized", args.budget, args.seed)
    try:
        cert = certify_impossible(A, budget)
    except PreconditionError as exc:
        raise InputError(str(exc)) from None
    rep = Report("obstruction-check")
    _certificate_into(rep, cert)
    ok = cert.checks.ok and cert.hits == 0
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), rep


COMMANDS = {
    "decompose": cmd_decompose,
    "rcf": cmd_rcf,
    "verify": cmd_verify,
    "census": cmd_census,
    "obstruction-check": cmd_obstruction_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field", help="field spec, e.g. 5 or 3^2:1,0,1; required with --matrix")
    common.add_argument("--input", help="matrix file ('-' for stdin)")
    common.add_argument("--matrix", help="inline matrix, rows separated by ';', e.g. '0 1;1 0'")
    common.add_argument("--mode", choices=MODES, default="rank_parameterized", help="search mode (default %(default)s)")
    common.add_argument("--budget", type=int, default=10**6, help="max search candidates (default %(default)s)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="search seed (default %(default)s)")
    common.add_argument("--format", choices=("text", "kv"), default="text")
    common.add_argument("--threads", type=int, default=1, help="census worker threads")
    common.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")

    parser = _Parser(
        prog="sqz-decomp", description="Diagonalizable plus square-zero decompositions over odd finite fields."
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("decompose", parents=[common], help="write A = D + M")
    sub.add_parser("rcf", parents=[common], help="invariant factors and transform")
    v = sub.add_parser("verify", parents=[common], help="check a given D and M against A")
    v.add_argument("--d", help="matrix file for D")
    v.add_argument("--m", help="matrix file for M")
    c = sub.add_parser("census", parents=[common], help="classify every matrix of one order")
    c.add_argument("--order", type=int)
    sub.add_parser("obstruction-check", parents=[common], help="certificate for the GF(3) cubic obstruction")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget < 1:
        print("error: --budget must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, rep = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(rep.render(args.format))
    if args.verbose:
        print(f"{args.command}: exit {code}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
