"""Command-line front end: ``realroot classify|form|witness|certify|verify|bench``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import NotRealRootedError, NoWitnessError, RealRootError
from .forms import build_form_exact, form_to_json, form_to_text
from .harness import CorpusSpec, generate_corpus, report_rows, report_to_csv, report_to_text, run_consistency, CSV_COLUMNS
from .poly import parse_polynomial, sturm_real_root_count
from .psd import classify_real_rooted
from .witness import (
    certificate_from_json,
    certificate_to_json,
    negative_witness,
    psd_certificate,
    verify_certificate,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
BENCH_M = (2, 4, 6, 8)


class UsageError(Exception):
    pass


def _int_range(text: str) -> tuple[int, int]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <lo>..<hi>, got {text!r}") from None


def _stripped_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def _stripped_float(text: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realroot", description="Decide and certify real-rootedness of a polynomial.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--tol", type=_stripped_float, default=None, help="witness tolerance (default 1e-6 or $REALROOT_TOL)")

    poly_help = 'coefficients in ascending order ("-1,0,1"), an expression ("t^2-1"), or "-" for stdin'

    p = sub.add_parser("classify", parents=[common], help="decide real-rootedness exactly")
    p.add_argument("poly", help=poly_help)

    p = sub.add_parser("form", parents=[common], help="print the form Phi_m")
    p.add_argument("poly", help=poly_help)
    p.add_argument("--m", type=_stripped_int, required=True)

    for name, text in (("witness", "negative witness for a polynomial with non-real roots"), ("certify", "sum-of-powers certificate for a real-rooted polynomial")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("poly", help=poly_help)
        p.add_argument("--m", type=_stripped_int, default=2)

    p = sub.add_parser("verify", parents=[common], help="check a certificate against a polynomial")
    p.add_argument("poly", help=poly_help)
    p.add_argument("--cert", required=True, help='certificate JSON file, or "-" for stdin')

    p = sub.add_parser("bench", parents=[common], help="randomized differential test and timing table")
    p.add_argument("--count", type=_stripped_int, default=100)
    p.add_argument("--deg", type=_int_range, default=(1, 8))
    p.add_argument("--coeff", type=_int_range, default=(-9, 9))
    p.add_argument("--seed", type=_stripped_int, default=0)
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock columns (byte-identical output)")
    return parser


def _protect_negative_args(argv: list[str]) -> list[str]:
    # "-1,0,1" or "--coeff -9..9" would otherwise be read as option flags
    out = []
    for tok in argv:
        if tok.startswith("-") and tok not in ("-", "-h") and not tok.startswith("--"):
            tok = " " + tok
        out.append(tok)
    return out


def _read_poly(text: str):
    if text.strip() == "-":
        text = sys.stdin.read()
    f = parse_polynomial(text.strip())
    if f.degree < 1:
        raise UsageError("polynomial must have degree >= 1")
    return f


def _even_m(m: int) -> int:
    if m < 2 or m % 2:
        raise UsageError(f"--m must be an even integer >= 2 (got {m})")
    return m


def cmd_classify(args) -> int:
    f = _read_poly(args.poly)
    hermite = classify_real_rooted(f)
    distinct_real, distinct_total = sturm_real_root_count(f)
    sturm = distinct_real == distinct_total
    if hermite != sturm:
        print(f"warning: Hermite decision {hermite} disagrees with Sturm count", file=sys.stderr)
    if args.format == "json":
        doc = {
            "polynomial": f.to_text(),
            "degree": f.degree,
            "real_rooted": hermite,
            "hermite_psd": hermite,
            "sturm": {"distinct_real": distinct_real, "distinct_total": distinct_total},
            "agree": hermite == sturm,
        }
        print(json.dumps(doc))
    else:
        print("real-rooted" if hermite else "has non-real roots")
        print(f"  Hermite form Phi_2 PSD (exact): {'yes' if hermite else 'no'}")
        print(f"  Sturm: {distinct_real} distinct real of {distinct_total} distinct roots")
    return EXIT_OK if hermite else EXIT_FAIL


def cmd_form(args) -> int:
    f = _read_poly(args.poly)
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    form = build_form_exact(f, args.m)
    print(form_to_json(form) if args.format == "json" else form_to_text(form))
    return EXIT_OK


def _report_line(report) -> str:
    return f"verification: {'pass' if report.passed else 'FAIL'} ({report.message}, residual {report.residual:.3g})"


def cmd_witness(args) -> int:
    f = _read_poly(args.poly)
    m = _even_m(args.m)
    try:
        w = negative_witness(f, m, tol=args.tol)
    except NoWitnessError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = verify_certificate(f, w, tol=args.tol)
    print(certificate_to_json(w))
    print(_report_line(report), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_certify(args) -> int:
    f = _read_poly(args.poly)
    m = _even_m(args.m)
    try:
        cert = psd_certificate(f, m)
    except NotRealRootedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = verify_certificate(f, cert)
    print(certificate_to_json(cert))
    print(_report_line(report), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.cert.strip() == "-":
        if args.poly.strip() == "-":
            raise UsageError("polynomial and certificate cannot both come from stdin")
        text = sys.stdin.read()
    else:
        try:
            with open(args.cert.strip()) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read certificate: {exc}") from exc
    f = _read_poly(args.poly)
    cert = certificate_from_json(text)
    report = verify_certificate(f, cert, tol=args.tol)
    if args.format == "json":
        print(json.dumps(report.to_dict()))
    else:
        print(_report_line(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args) -> int:
    spec = CorpusSpec(args.count, args.deg, args.coeff, args.seed)
    try:
        corpus = generate_corpus(spec)
    except RealRootError as exc:
        raise UsageError(str(exc)) from exc
    report = run_consistency(corpus, BENCH_M, tol=args.tol)
    timings = not args.no_timing
    if args.format == "csv":
        sys.stdout.write(report_to_csv(report, timings))
    elif args.format == "json":
        rows = [dict(zip(CSV_COLUMNS, r)) for r in report_rows(report, timings)]
        doc = {
            "count": len(report.entries),
            "seed": args.seed,
            "m": list(BENCH_M),
            "mismatches": report.mismatches,
            "max_witness_residual": report.max_witness_residual,
            "max_cert_residual": report.max_cert_residual,
            "failures": report.failures,
            "rows": rows,
        }
        print(json.dumps(doc, indent=2))
    else:
        sys.stdout.write(report_to_text(report, timings))
    return EXIT_OK if report.mismatches == 0 and not report.failures else EXIT_FAIL


COMMANDS = {
    "classify": cmd_classify,
    "form": cmd_form,
    "witness": cmd_witness,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_negative_args(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, RealRootError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
