"""Command-line front end: ``msrcode {build,encode,repair,reconstruct,verify,bench}``.

Exit codes: 0 success, 1 verification or repair failure, 2 usage error,
3 I/O or format error.  ``--json`` prints one JSON object per command;
the default prints the same fields as ``key: value`` lines.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .codec import ReadCounter, access_report, encode, extract_helpers, repair_systematic
from .construction import CoefficientNotFound, ConstructionError, assign_coefficients, search_c, verify_mds
from .galois import FieldSpec
from .params import NodeId, ParameterError, validate
from .shardio import (
    MANIFEST_NAME,
    Manifest,
    ShardError,
    load_manifest,
    read_all,
    repair_shard,
    save_manifest,
    write_shards,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CommandFailed(Exception):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result or {}


def _emit(result: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(result, sort_keys=False) + "\n")
        return
    for key, value in result.items():
        if isinstance(value, dict):
            value = " ".join(f"{k}={v}" for k, v in value.items())
        elif isinstance(value, list):
            value = " ".join(str(v) for v in value)
        out.write(f"{key}: {value}\n")


def _parse_failed(args, params) -> NodeId:
    if args.failed and args.node_ordinal is not None:
        raise UsageError("give either --failed or --node-ordinal, not both")
    try:
        if args.failed:
            s, t = (int(v) for v in args.failed.split(","))
            node = NodeId.systematic(s, t)
            node.ordinal(params)
        elif args.node_ordinal is not None:
            node = NodeId.from_ordinal(args.node_ordinal, params)
        else:
            raise UsageError("name the failed node with --failed s,t or --node-ordinal")
    except (ValueError, ParameterError) as exc:
        raise UsageError(f"bad failed node: {exc}") from None
    if not node.is_systematic:
        raise UsageError(f"{node} is a parity node; only systematic nodes can be repaired")
    return node


def _shards_dir(args) -> Path:
    return Path(args.shards_dir) if args.shards_dir else Path(args.manifest).parent


def cmd_build(args) -> dict:
    try:
        params = validate(args.m, args.r, FieldSpec(args.field_bits))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t0 = time.perf_counter()
    desc = assign_coefficients(params, args.seed)
    result = {
        "n": params.n, "k": params.k, "d": params.d, "alpha": params.alpha,
        "beta": params.beta, "B": params.B, "field_bits": params.field.width,
        "field_bound": params.field_bound,
    }
    try:
        found = search_c(desc)
    except CoefficientNotFound as exc:
        result["elapsed_s"] = round(time.perf_counter() - t0, 6)
        raise CommandFailed(str(exc), result) from None
    desc = desc.with_c(found.c)
    report = verify_mds(desc)
    if not report.ok:
        raise CommandFailed(f"verification failed for subsets {report.failing}", result)
    result.update(
        c=found.c,
        rejected_candidates=found.rejected,
        subsets_verified=report.checked,
        elapsed_s=round(time.perf_counter() - t0, 6),
    )
    if not params.meets_field_bound:
        result["warning"] = (
            f"2^{params.field.width} < C({params.n},{params.k})*{params.r}^{params.m + 1}"
            f" = {params.field_bound}; valid c found anyway"
        )
    save_manifest(args.out, Manifest(desc))
    result["manifest"] = str(args.out)
    return result


def cmd_encode(args) -> dict:
    man = load_manifest(args.manifest)
    data = Path(args.input).read_bytes()
    paths, full = write_shards(data, man.desc, args.outdir)
    return {
        "file_length": full.file_length,
        "stripe_count": full.stripe_count,
        "padding": full.padding,
        "shards": [str(p) for p in paths],
        "manifest": str(Path(args.outdir) / MANIFEST_NAME),
    }


def cmd_repair(args) -> dict:
    man = load_manifest(args.manifest)
    node = _parse_failed(args, man.params)
    counter = ReadCounter()
    try:
        path = repair_shard(_shards_dir(args), man, node, counter)
    except ShardError as exc:
        if "missing" in str(exc):
            raise CommandFailed(f"{exc}; use 'reconstruct' instead") from None
        raise
    rep = access_report(node, man.params)
    stripes = max(man.stripe_count or 0, 1)
    return {
        "failed": str(node),
        "ordinal": node.ordinal(man.params),
        "per_helper": rep.per_helper[next(iter(rep.per_helper))],
        "helpers": len(rep.per_helper),
        "total": rep.total,
        "baseline": rep.baseline,
        "ratio": rep.ratio,
        "symbols_read": counter.total,
        "stripes": man.stripe_count,
        "symbols_read_per_stripe": counter.total // stripes,
        "shard": str(path),
    }


def cmd_reconstruct(args) -> dict:
    man = load_manifest(args.manifest)
    nodes = None
    if args.nodes:
        try:
            nodes = [int(v) for v in args.nodes.split(",")]
        except ValueError:
            raise UsageError(f"bad node list {args.nodes!r}") from None
        if len(set(nodes)) != man.params.k or not all(0 <= u < man.params.n for u in nodes):
            raise UsageError(f"--nodes needs {man.params.k} distinct ordinals in [0, {man.params.n})")
    data = read_all(_shards_dir(args), man, nodes)
    Path(args.output).write_bytes(data)
    return {"bytes": len(data), "output": str(args.output)}


def cmd_verify(args) -> dict:
    man = load_manifest(args.manifest)
    if not man.desc.c:
        raise CommandFailed("manifest has no common coefficient c")
    t0 = time.perf_counter()
    report = verify_mds(man.desc)
    result = {
        "subsets_checked": report.checked,
        "failing": [list(D) for D in report.failing],
        "ok": report.ok,
        "elapsed_s": round(time.perf_counter() - t0, 6),
    }
    if not report.ok:
        raise CommandFailed(f"{len(report.failing)} subsets are not decodable", result)
    return result


def cmd_bench(args) -> dict:
    man = load_manifest(args.manifest)
    p = man.params
    desc = man.desc
    rng = np.random.default_rng(args.seed)
    reads = []
    t0 = time.perf_counter()
    for _ in range(args.trials):
        msg = rng.integers(0, p.field.order, (p.k, p.alpha)).astype(p.field.dtype)
        cw = encode(msg, desc)
        for u in range(p.k):
            counter = ReadCounter()
            got = repair_systematic(u, extract_helpers(cw, u, p, counter), desc)
            if not np.array_equal(got, msg[u]):
                raise CommandFailed(f"repair of node {u} was not exact")
            reads.append(counter.total)
    elapsed = time.perf_counter() - t0
    repairs = max(len(reads), 1)
    return {
        "trials": args.trials,
        "repairs": len(reads),
        "mean_symbols_read": float(np.mean(reads)) if reads else 0.0,
        "baseline": p.k * p.alpha,
        "elapsed_s": round(elapsed, 6),
        "mean_repair_ms": round(1000 * elapsed / repairs, 6),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msrcode", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="choose coefficients, search c, verify, write a manifest")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--field-bits", type=int, default=16, choices=(8, 16))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="manifest path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="split a file into n shards")
    p.add_argument("--manifest", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("repair", help="regenerate one systematic shard from n-1 helpers")
    p.add_argument("--manifest", required=True)
    p.add_argument("--failed", help="systematic node as s,t (s 1-based, t 0-based)")
    p.add_argument("--node-ordinal", type=int)
    p.add_argument("--shards-dir", help="defaults to the manifest's directory")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("reconstruct", help="rebuild the file from k shards")
    p.add_argument("--manifest", required=True)
    p.add_argument("--nodes", help="comma-separated node ordinals; default: first k present")
    p.add_argument("--output", required=True)
    p.add_argument("--shards-dir", help="defaults to the manifest's directory")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", help="check every k-subset is decodable")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="repair every systematic node over random messages")
    p.add_argument("--manifest", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CommandFailed as exc:
        _emit({**exc.result, "error": str(exc)}, args.json)
        return EXIT_FAIL
    except (OSError, ShardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConstructionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(result, args.json)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
