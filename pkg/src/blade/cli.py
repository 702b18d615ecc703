"""Command-line entry point: ``blade <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import sys

from .analysis import redundancy_report
from .bitio import BitStream, dump_payload, load_payload
from .codebook import ContextSet, build_context_set, deserialize, serialize
from .codec import decode_sequence, encode_sequence
from .errors import BladeError
from .harness import BenchConfig, run_benchmark, write_csv

ANALYZE_HEADER = ("n", "t", "p", "exact", "asymptotic", "delta",
                  "term1", "term2", "term3", "residual")


class CliError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _read(path: str, binary: bool):
    try:
        with open(path, "rb" if binary else "r", **({} if binary else {"encoding": "utf-8"})) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}")


def _write(path: str, data) -> None:
    binary = isinstance(data, bytes)
    try:
        with open(path, "wb" if binary else "w",
                  **({} if binary else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}")


def _load_context_set(path: str) -> ContextSet:
    obj = deserialize(_read(path, binary=False))
    if not isinstance(obj, ContextSet):
        raise CliError(f"{path} holds a single table, not a context set")
    return obj


def unpack_raw(data: bytes, n: int) -> list:
    """Split packed n-bit blocks (first bit most significant) out of ``data``.

    The last byte may carry fewer than 8 zero padding bits; anything else is
    rejected so that every file has exactly one reading.
    """
    total = len(data) * 8
    count, pad = divmod(total, n)
    if pad >= 8:
        raise CliError(f"{len(data)} bytes do not hold a whole number of {n}-bit blocks")
    value = int.from_bytes(data, "big")
    if value & ((1 << pad) - 1):
        raise CliError("non-zero padding bits after the last block")
    value >>= pad
    mask = (1 << n) - 1
    return [(value >> (n * (count - 1 - i))) & mask for i in range(count)]


def pack_raw(blocks, n: int) -> bytes:
    out = BitStream()
    for w in blocks:
        out.write_bits(w, n)
    return out.getvalue()


def cmd_build_tables(args) -> None:
    _write(args.out, serialize(build_context_set(args.n)))


def cmd_encode(args) -> None:
    cs = _load_context_set(args.tables)
    blocks = unpack_raw(_read(args.infile, binary=True), cs.n)
    _write(args.out, dump_payload(encode_sequence(blocks, cs)))


def cmd_decode(args) -> None:
    cs = _load_context_set(args.tables)
    if args.blocks < 0:
        raise CliError("--blocks must be non-negative")
    stream = load_payload(_read(args.infile, binary=True))
    blocks = decode_sequence(stream, cs, args.blocks)
    if stream.remaining:
        raise CliError(f"{stream.remaining} unused bits after {args.blocks} blocks")
    _write(args.out, pack_raw(blocks, cs.n))


def _emit(rows, header, out) -> None:
    if out:
        fh = open(out, "w", newline="", encoding="utf-8")
    else:
        fh = sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_bench(args) -> None:
    cfg = BenchConfig(n=args.n, p=args.p, m=tuple(args.m), Q=args.q, seed=args.seed,
                      output=None)
    records = run_benchmark(cfg, build_context_set(args.n))
    if args.out:
        try:
            write_csv(args.out, records)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror}")
    else:
        _emit([r.row() for r in records], ("n", "p", "m", "total_bits_avg", "rate"), None)


def cmd_analyze(args) -> None:
    rows = []
    for t in args.t:
        if t < 1:
            raise CliError("--t values must be positive")
        for p in args.p_grid:
            r = redundancy_report(args.n, t, p)
            rows.append([r.n, r.t, repr(r.p)] + [repr(x) for x in (
                r.exact_rate, r.asymptotic_rate, r.delta_exact, r.leading_term,
                r.second_term, r.third_term, r.residual)])
    try:
        _emit(rows, ANALYZE_HEADER, args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blade", description="Adaptive binary block coder")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-tables", help="write the context-set artifact for block size n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_tables)

    p = sub.add_parser("encode", help="encode a file of packed n-bit blocks")
    p.add_argument("--tables", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a bitstream back to packed blocks")
    p.add_argument("--tables", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bench", help="Monte Carlo redundancy benchmark")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--m", type=_int_list, default=[1, 2, 4, 10, 64],
                   help="comma-separated sequence lengths in blocks")
    p.add_argument("--q", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("analyze", help="exact vs asymptotic redundancy table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=_int_list, required=True, help="comma-separated sample lengths")
    p.add_argument("--p-grid", type=_float_list, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (BladeError, CliError, ValueError) as exc:
        print(f"blade {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
