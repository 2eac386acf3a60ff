"""Command-line front end: generate, verify, sieve, witness, export, render,
library, paper-instance.

Exit codes are a contract: 0 success, 1 verification/detection failure,
2 usage error, 3 I/O or parse error. Numeric options accept exact rational
syntax ("1/1000"); nothing is ever parsed through floating point.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exact import rational
from .echelon import asymptote_witness, frobenius_norm_squared
from .certify import WeakCertificate, sieve_detect, verify_weak_infeasibility
from .generator import DISJOINT_ONLY, OVERLAPPING_ALLOWED, GenConfig, generate
from .formats import (
    NativeBundle,
    NativeFormatError,
    SdpaFormatError,
    read_native,
    render_blocks,
    write_cbf,
    write_native,
    write_sdpa,
)
from . import paper_instances

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _rational_flag(text: str):
    try:
        return rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r} ({exc})") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaksdp",
        description="Construct, verify and export weakly infeasible semidefinite programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate an instance and write a native bundle")
    p_gen.add_argument("--n", type=_positive_int, required=True)
    p_gen.add_argument("--m", type=_positive_int, required=True)
    p_gen.add_argument("--k", type=_positive_int, required=True)
    p_gen.add_argument("--l", type=_positive_int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--entry-range", type=_positive_int, default=4)
    p_gen.add_argument("--overlap", choices=[OVERLAPPING_ALLOWED, DISJOINT_ONLY],
                       default=OVERLAPPING_ALLOWED)
    p_gen.add_argument("--messy", action="store_true")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_generate)

    p_verify = sub.add_parser("verify", help="verify the certificate in a bundle")
    p_verify.add_argument("path")
    p_verify.add_argument("--json", action="store_true")
    p_verify.set_defaults(func=_cmd_verify)

    p_sieve = sub.add_parser("sieve", help="greedy echelon detection on the instance as stored")
    p_sieve.add_argument("path")
    p_sieve.add_argument("--json", action="store_true")
    p_sieve.set_defaults(func=_cmd_sieve)

    p_wit = sub.add_parser("witness", help="exact PSD point within --eps of the constraint set")
    p_wit.add_argument("path")
    p_wit.add_argument("--eps", type=_rational_flag, default=rational("1/100"))
    p_wit.set_defaults(func=_cmd_witness)

    p_exp = sub.add_parser("export", help="emit the stored instance in a solver format")
    p_exp.add_argument("path")
    p_exp.add_argument("--format", choices=["dat-s", "cbf"], required=True)
    p_exp.add_argument("--out", required=True)
    p_exp.set_defaults(func=_cmd_export)

    p_render = sub.add_parser("render", help="render echelon block structure to SVG")
    p_render.add_argument("path")
    p_render.add_argument("--outdir", required=True)
    p_render.set_defaults(func=_cmd_render)

    p_lib = sub.add_parser("library", help="build the paired clean/messy instance library")
    p_lib.add_argument("--root", required=True)
    p_lib.add_argument("--profile", choices=sorted(paper_instances.LIBRARY_PROFILES), default="default")
    p_lib.set_defaults(func=_cmd_library)

    p_paper = sub.add_parser("paper-instance", help="materialize a built-in reference instance")
    p_paper.add_argument("--name", choices=["me", "large", "3x3", "motzkin"], required=True)
    p_paper.add_argument("--alpha", type=_rational_flag, default=rational(1),
                         help="parameter for the 3x3 family")
    p_paper.add_argument("--out")
    p_paper.set_defaults(func=_cmd_paper_instance)
    return parser


def _load_bundle(path: str) -> NativeBundle:
    return read_native(Path(path))


def _require_certificate(bundle: NativeBundle) -> WeakCertificate:
    if bundle.certificate is None:
        raise _NoCertificate("bundle carries no certificate")
    return bundle.certificate


class _NoCertificate(Exception):
    pass


def _cmd_generate(args) -> int:
    try:
        cfg = GenConfig(
            n=args.n, m=args.m, k=args.k, l=args.l, seed=args.seed,
            entry_range=args.entry_range,
            structure_overlap_policy=args.overlap,
            messy=args.messy,
        )
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    instance = generate(cfg)
    cert = WeakCertificate.from_instance(instance)
    report = verify_weak_infeasibility(cert)
    bundle = NativeBundle(
        instance=instance.raw,
        certificate=cert,
        generation={"seed": cfg.seed, "config": paper_instances._config_json(cfg)},
    )
    write_native(bundle, args.out)
    print(report.summary())
    print(f"wrote {args.out}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_verify(args) -> int:
    bundle = _load_bundle(args.path)
    cert = _require_certificate(bundle)
    report = verify_weak_infeasibility(cert)
    print(report.to_json() if args.json else report.summary())
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_sieve(args) -> int:
    bundle = _load_bundle(args.path)
    detection = sieve_detect(bundle.instance)
    if detection is None:
        print(json.dumps({"detected": False}) if args.json else "NotDetected")
        return EXIT_FAIL
    blocks = [sorted(b) for b in detection.structure.blocks]
    if args.json:
        print(json.dumps({
            "detected": True,
            "k": detection.k,
            "blocks": blocks,
            "permutation": list(detection.permutation),
        }))
    else:
        print(f"detected echelon prefix: k = {detection.k}")
        print(f"constraint order: {list(detection.permutation)}")
        print(f"blocks: {blocks}")
    return EXIT_PASS


def _cmd_witness(args) -> int:
    bundle = _load_bundle(args.path)
    cert = _require_certificate(bundle)
    witness = asymptote_witness(cert.clean, cert.xseq, cert.q_structure, args.eps)
    print("psd point within tolerance of the clean constraint set:")
    for row in witness.x_out.to_rows():
        print("  " + " ".join(str(v) for v in row))
    print(f"distance bound: |X_delta|^2 = {frobenius_norm_squared(witness.x_delta)} <= eps^2 = {args.eps * args.eps}")
    print(f"delta = {witness.delta}, multipliers = {[str(g) for g in witness.gammas]}")
    return EXIT_PASS


def _cmd_export(args) -> int:
    bundle = _load_bundle(args.path)
    if args.format == "dat-s":
        write_sdpa(bundle.instance, args.out, label=bundle.label)
    else:
        write_cbf(bundle.instance, args.out, label=bundle.label)
    print(f"wrote {args.out}")
    return EXIT_PASS


def _cmd_render(args) -> int:
    bundle = _load_bundle(args.path)
    cert = _require_certificate(bundle)
    written = render_blocks(cert.clean.A[: cert.k + 1], cert.p_structure, args.outdir, stem="A")
    written += render_blocks(cert.xseq, cert.q_structure, args.outdir, stem="X")
    print(f"wrote {len(written)} images to {args.outdir}")
    return EXIT_PASS


def _cmd_library(args) -> int:
    manifest = paper_instances.library_build(args.root, args.profile)
    print(f"built {manifest['count']} instances under {args.root}")
    return EXIT_PASS


def _cmd_paper_instance(args) -> int:
    if args.name == "me":
        raw, cert = paper_instances.me_instance()
    elif args.name == "large":
        cert = paper_instances.large_certificate()
        raw = cert.raw
    elif args.name == "3x3":
        instance = paper_instances.three_by_three(args.alpha)
        cert = WeakCertificate.from_instance(instance)
        raw = cert.raw
    else:
        cert = paper_instances.motzkin_certificate()
        raw = cert.raw
    report = verify_weak_infeasibility(cert)
    print(report.summary())
    if args.out:
        write_native(NativeBundle(instance=raw, certificate=cert, label=args.name), args.out)
        print(f"wrote {args.out}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_IO
    except (SdpaFormatError, NativeFormatError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IsADirectoryError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _NoCertificate as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
