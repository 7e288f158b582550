"""Command-line front end."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterable, Iterator, Sequence

from . import exactla as la
from .construct import (
    ConstructionError,
    ResourceLimitError,
    VerificationError,
    maximal_overlattice_with_certificates,
    representative,
)
from .count import count_report, count_row, rows_to_csv
from .genus import SymbolParseError, enumerate_genera, format_symbol, parse_symbol, symbol_of, symbol_of_gram
from .lattice import Lattice, gram, index_in

DEFAULT_SEED = 20240917
EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RESOURCE = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    rank: int | None = None
    det: int | None = None
    max_det: int | None = None
    parity: str = "any"
    signature: tuple[int, int] | None = None
    with_representatives: bool = False
    output_format: str = "json"
    seed: int = DEFAULT_SEED
    verify: bool = True
    jobs: int = 1


class UsageError(ValueError):
    pass


def resolve_seed(cli_value: int | None) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get("GENUSFORGE_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError as exc:
            raise UsageError(f"GENUSFORGE_SEED is not an integer: {env!r}") from exc
    return DEFAULT_SEED


def _parse_signature(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("signature must look like 'a,b'") from exc
    if a < 0 or b < 0:
        raise argparse.ArgumentTypeError("signature entries must be nonnegative")
    return a, b


def read_gram(source: str) -> list[list[int]]:
    """Integer Gram matrix from a JSON file ('-' reads stdin)."""
    text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if isinstance(data, dict):
        data = data.get("gram")
    if not isinstance(data, list) or not data or not all(isinstance(r, list) and len(r) == len(data) for r in data):
        raise UsageError(f"{source}: expected a square list of lists")
    if not all(isinstance(x, int) for r in data for x in r):
        raise UsageError(f"{source}: Gram entries must be integers")
    if not la.is_symmetric(data):
        raise UsageError(f"{source}: Gram matrix is not symmetric")
    if la.det(data) == 0:
        raise UsageError(f"{source}: Gram matrix is singular")
    return data


def _int_matrix(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in M]


# -- enumeration ---------------------------------------------------------------

def _genus_jobs(cfg: RunConfig) -> Iterator[tuple[int, str]]:
    dets = [cfg.det] if cfg.det is not None else range(1, cfg.max_det + 1)
    for D in dets:
        for g in enumerate_genera(cfg.rank, D, cfg.signature, cfg.parity):
            yield D, format_symbol(g)


def _build_record(job: tuple[int, str, bool, bool]) -> dict:
    D, text, with_rep, verify = job
    g = parse_symbol(text)
    record = {
        "n": g.rank,
        "D": D,
        "signature": list(g.signature),
        "even": g.is_even,
        "symbol": text,
    }
    if not with_rep:
        return record
    record.update(gram=None, verified=False, error=None, status=EXIT_OK)
    try:
        M = representative(g, verify=verify)
        record["gram"] = _int_matrix(gram(M))
        record["verified"] = verify
    except ResourceLimitError as exc:
        record.update(error=str(exc), status=EXIT_RESOURCE)
    except ConstructionError as exc:
        record.update(error=str(exc), status=EXIT_VERIFY)
    return record


def _ordered_map(func, jobs: Iterable, workers: int) -> Iterator:
    if workers <= 1:
        yield from map(func, jobs)
        return
    with Pool(workers) as pool:
        yield from pool.imap(func, jobs, chunksize=8)


def enumerate_records(cfg: RunConfig) -> Iterator[dict]:
    jobs = ((D, text, cfg.with_representatives, cfg.verify) for D, text in _genus_jobs(cfg))
    yield from _ordered_map(_build_record, jobs, cfg.jobs)


ENUM_CSV = ("n", "D", "signature", "even", "symbol", "verified", "gram", "error")


def _enum_line(record: dict, fmt: str, columns: Sequence[str]) -> str:
    record = {k: v for k, v in record.items() if k != "status"}
    if fmt == "json":
        return json.dumps(record, sort_keys=True)
    if fmt == "csv":
        row = []
        for col in columns:
            v = record.get(col)
            if col == "signature":
                v = "{},{}".format(*v)
            elif col == "gram" and v is not None:
                v = json.dumps(v)
            row.append("" if v is None else v)
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow(row)
        return buf.getvalue()
    line = record["symbol"]
    if "gram" in record:
        line += "  " + (json.dumps(record["gram"]) if record["gram"] is not None else f"ERROR {record['error']}")
    return line


def cmd_enumerate(cfg: RunConfig, out) -> int:
    columns = ENUM_CSV if cfg.with_representatives else ENUM_CSV[:5]
    if cfg.output_format == "csv":
        out.write(",".join(columns) + "\n")
    code = EXIT_OK
    for record in enumerate_records(cfg):
        status = record.get("status", EXIT_OK)
        if status == EXIT_VERIFY or (status == EXIT_RESOURCE and code == EXIT_OK):
            code = status
        out.write(_enum_line(record, cfg.output_format, columns) + "\n")
        out.flush()
    return code


# -- single-object commands ----------------------------------------------------

def cmd_symbol(source: str, fmt: str, out) -> int:
    g = symbol_of_gram(read_gram(source))
    text = format_symbol(g)
    out.write((json.dumps({"symbol": text}) if fmt == "json" else text) + "\n")
    return EXIT_OK


def cmd_representative(text: str, verify: bool, out) -> int:
    g = parse_symbol(text)
    M = representative(g, verify=verify)
    out.write(json.dumps({"symbol": format_symbol(g), "gram": _int_matrix(gram(M)), "verified": verify}) + "\n")
    return EXIT_OK


def cmd_maximal(source: str, verify: bool, out) -> int:
    G = read_gram(source)
    L = Lattice.from_gram(G)
    M, certs = maximal_overlattice_with_certificates(L)
    payload = {
        "gram": _int_matrix(gram(M)),
        "basis": [[str(x) for x in row] for row in M.basis],
        "index": int(index_in(L, M)),
        "certificates": [{"p": c.p, "group_size": c.group_size, "witness": c.witness} for c in certs],
    }
    if verify:
        payload["symbol"] = format_symbol(symbol_of(M))
    out.write(json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def _parse_k_range(text: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("k range must look like 'lo:hi'") from exc
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError("k range needs 0 <= lo <= hi")
    return range(lo, hi + 1)


def cmd_count(rank: int, det: int | None, prime: int | None, ks: range | None, fmt: str, out) -> int:
    if det is not None:
        rows = count_report(rank, det).rows
    else:
        rows = tuple(count_row(rank, prime, k) for k in ks)
    if fmt == "csv":
        out.write(rows_to_csv(rows))
    elif fmt == "json":
        for r in rows:
            out.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    else:
        for r in rows:
            out.write(f"n={r.n} D={r.D} p={r.p} k={r.k} exact={r.exact} series={r.series}\n")
    return EXIT_OK


def cmd_timing(rank: int, max_det: int, step: int, seed: int, verify: bool, out) -> int:
    """CSV of construction times, one sampled genus per determinant."""
    rng = random.Random(seed)
    out.write("n,D,genera,symbol,seconds\n")
    for D in range(1, max_det + 1, step):
        genera = enumerate_genera(rank, D)
        if not genera:
            continue
        g = rng.choice(genera)
        start = time.perf_counter()
        representative(g, verify=verify)
        elapsed = time.perf_counter() - start
        out.write(f"{rank},{D},{len(genera)},\"{format_symbol(g)}\",{elapsed:.6f}\n")
        out.flush()
    return EXIT_OK


# -- argument handling ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genusforge", description="Genus symbols and lattice representatives.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "csv", "text")):
        p.add_argument("--format", choices=formats, default="json", dest="output_format")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
        p.add_argument("--no-verify", action="store_false", dest="verify")
        p.add_argument("--jobs", type=int, default=1)

    e = sub.add_parser("enumerate", help="list genus symbols")
    e.add_argument("--rank", type=int, required=True)
    dets = e.add_mutually_exclusive_group(required=True)
    dets.add_argument("--det", type=int)
    dets.add_argument("--max-det", type=int)
    parity = e.add_mutually_exclusive_group()
    parity.add_argument("--even", action="store_const", const="even", dest="parity")
    parity.add_argument("--odd", action="store_const", const="odd", dest="parity")
    e.add_argument("--signature", type=_parse_signature)
    e.add_argument("--with-representatives", action="store_true")
    common(e)

    s = sub.add_parser("symbol", help="genus symbol of a Gram matrix given as JSON")
    s.add_argument("gram_file")
    common(s, ("json", "text"))

    r = sub.add_parser("representative", help="Gram matrix of a lattice in the given genus")
    r.add_argument("symbol")
    common(r, ("json",))

    m = sub.add_parser("maximal", help="maximal integral overlattice of a Gram matrix")
    m.add_argument("gram_file")
    common(m, ("json",))

    c = sub.add_parser("count", help="local symbol counts against the series and bounds")
    c.add_argument("--rank", type=int, required=True)
    what = c.add_mutually_exclusive_group(required=True)
    what.add_argument("--det", type=int)
    what.add_argument("--k-range", type=_parse_k_range)
    c.add_argument("--prime", type=int, default=3)
    common(c, ("csv", "json", "text"))

    t = sub.add_parser("timing", help="CSV of construction times for a determinant sweep")
    t.add_argument("--rank", type=int, required=True)
    t.add_argument("--max-det", type=int, required=True)
    t.add_argument("--step", type=int, default=1)
    common(t, ("csv",))
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "rank", 1) is not None and getattr(args, "rank", 1) < 1:
        raise UsageError("--rank must be positive")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    for name in ("det", "max_det"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    return RunConfig(
        command=args.command,
        rank=getattr(args, "rank", None),
        det=getattr(args, "det", None),
        max_det=getattr(args, "max_det", None),
        parity=getattr(args, "parity", None) or "any",
        signature=getattr(args, "signature", None),
        with_representatives=getattr(args, "with_representatives", False),
        output_format=args.output_format,
        seed=resolve_seed(args.seed),
        verify=args.verify,
        jobs=args.jobs,
    )


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    err = sys.stderr
    try:
        cfg = _config(args)
        if cfg.command == "enumerate":
            return cmd_enumerate(cfg, out)
        if cfg.command == "symbol":
            return cmd_symbol(args.gram_file, cfg.output_format, out)
        if cfg.command == "representative":
            return cmd_representative(args.symbol, cfg.verify, out)
        if cfg.command == "maximal":
            return cmd_maximal(args.gram_file, cfg.verify, out)
        if cfg.command == "count":
            if args.k_range is not None and args.prime < 2:
                raise UsageError("--prime must be a prime")
            return cmd_count(cfg.rank, cfg.det, args.prime, args.k_range, cfg.output_format, out)
        return cmd_timing(cfg.rank, cfg.max_det, args.step, cfg.seed, cfg.verify, out)
    except BrokenPipeError:
        # downstream reader went away (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except SymbolParseError as exc:
        err.write(f"genusforge: parse error: {exc}\n")
        return EXIT_USAGE
    except (UsageError, OSError) as exc:
        err.write(f"genusforge: {exc}\n")
        return EXIT_USAGE
    except VerificationError as exc:
        err.write(f"genusforge: verification failed: {exc}\n")
        return EXIT_VERIFY
    except ResourceLimitError as exc:
        err.write(f"genusforge: resource limit: {exc}\n")
        return EXIT_RESOURCE
    except (ConstructionError, ValueError) as exc:
        err.write(f"genusforge: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
