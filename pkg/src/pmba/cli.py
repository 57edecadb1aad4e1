"""Command-line front end: split files into shards, rebuild them, repair
missing shards, verify integrity, inspect parameters, run cluster drills.

Exit codes: 0 success, 1 usage error, 2 data or verification error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from . import shardio, striping
from .cluster import CSV_HEADER, Cluster, HelperPolicy
from .matrix import InconsistencyError, SingularMatrixError
from .params import comparison_subpacketization, derive_params
from .shardio import ShardFormatError

_SHARD_NAME = re.compile(r"^(?P<stem>.*\.shard)(?P<index>\d+)$")


def _shard_file_name(original_name: str, node_index: int) -> str:
    return f"{original_name}.shard{node_index:02d}"


def _manifest_file_name(original_name: str) -> str:
    return f"{original_name}.manifest"


def _read_shard_set(paths):
    """Read several shard files and demand mutually decodable headers."""
    if not paths:
        raise ValueError("no shard files given")
    headers = {}
    payloads = {}
    names = {}
    key = None
    key_owner = None
    for p in paths:
        header, symbols = shardio.read_shard(p)
        if key is None:
            key = header.code_key()
            key_owner = p
        elif header.code_key() != key:
            raise ShardFormatError(
                f"{p}: header disagrees with {key_owner}; shards are not from "
                f"the same encoding"
            )
        j = header.node_index
        if j in payloads:
            if not np.array_equal(payloads[j], symbols):
                raise ShardFormatError(
                    f"{p} and {names[j]} both claim node {j} but differ"
                )
            continue
        headers[j] = header
        payloads[j] = symbols
        names[j] = str(p)
    any_header = next(iter(headers.values()))
    params = shardio.shard_params(any_header)
    return params, any_header, headers, payloads, names


def cmd_encode(args) -> int:
    params = derive_params(args.k, args.delta, args.n, q=args.q)
    if params.q > shardio.MAX_HEADER_Q:
        raise ValueError(
            f"q = {params.q} does not fit the two-byte shard header field "
            f"(max {shardio.MAX_HEADER_Q})"
        )
    input_path = Path(args.input)
    data = input_path.read_bytes()
    source = striping.bytes_to_source(data, params)
    stripes = source.shape[0]
    payloads = striping.encode_stripes(source, params)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header0 = None
    entries = []
    for j in range(1, params.n + 1):
        header = shardio.header_for(params, j, stripes, len(data))
        header0 = header0 or header
        name = _shard_file_name(input_path.name, j)
        shardio.write_shard(out_dir / name, header, payloads[j - 1])
        crc = shardio.payload_crc(payloads[j - 1])
        entries.append((j, name, crc))
        print(f"wrote {out_dir / name} ({payloads[j - 1].size} symbols)")
    manifest = out_dir / _manifest_file_name(input_path.name)
    shardio.write_manifest(manifest, input_path.name, params, header0, entries)
    print(f"wrote {manifest}")
    print(
        f"encoded {len(data)} bytes into {params.n} shards "
        f"({stripes} stripes, alpha = {params.alpha})"
    )
    return 0


def cmd_reconstruct(args) -> int:
    params, header, headers, payloads, names = _read_shard_set(args.shards)
    available = sorted(payloads)
    if args.nodes:
        chosen = sorted({int(t) for t in args.nodes.split(",")})
        missing = [j for j in chosen if j not in payloads]
        if missing:
            raise ValueError(
                f"requested nodes {missing} are not among the given shards "
                f"{available}"
            )
        if len(chosen) != params.k:
            raise ValueError(f"pick exactly k = {params.k} nodes, got {len(chosen)}")
    else:
        if len(available) < params.k:
            raise ValueError(
                f"need at least k = {params.k} shard files, got {len(available)}"
            )
        chosen = available[: params.k]
    source = striping.reconstruct_stripes(
        {j: payloads[j] for j in chosen}, params
    )
    data = striping.source_to_bytes(source, header.original_length)
    shardio.atomic_write_bytes(args.out, data)
    print(f"reconstructed {len(data)} bytes from nodes {chosen} into {args.out}")
    return 0


def cmd_repair(args) -> int:
    params, header, headers, payloads, names = _read_shard_set(args.shards)
    f = args.failed
    if not 1 <= f <= params.n:
        raise ValueError(f"failed index must be in 1..{params.n}, got {f}")
    if f in payloads:
        raise ValueError(f"node {f} cannot appear among its own helpers")
    rebuilt = striping.repair_stripes(payloads, f, params)

    if args.out:
        out_path = Path(args.out)
    else:
        m = _SHARD_NAME.match(Path(args.shards[0]).name)
        if not m:
            raise ValueError(
                "cannot derive an output name from the helper file names; "
                "pass --out explicitly"
            )
        out_dir = Path(args.out_dir) if args.out_dir else Path(args.shards[0]).parent
        out_path = out_dir / f"{m.group('stem')}{f:02d}"
    new_header = shardio.ShardHeader(
        q=header.q,
        n=header.n,
        k=header.k,
        delta=header.delta,
        node_index=f,
        stripe_count=header.stripe_count,
        original_length=header.original_length,
        eval_points=header.eval_points,
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    shardio.write_shard(out_path, new_header, rebuilt)
    print(
        f"repaired node {f} from {len(payloads)} helpers "
        f"({sorted(payloads)}) into {out_path}"
    )
    return 0


def cmd_verify(args) -> int:
    params, header, headers, payloads, names = _read_shard_set(args.shards)
    print(
        f"code: q={params.q} n={params.n} k={params.k} delta={params.delta} "
        f"stripes={header.stripe_count} length={header.original_length}"
    )
    crcs = {}
    for j in sorted(payloads):
        crc = shardio.payload_crc(payloads[j])
        crcs[j] = crc
        print(f"node {j:2d}  {names[j]}  crc32={crc:08x}  ok")
    if args.manifest:
        entries = shardio.read_manifest(args.manifest)
        if int(entries.get("length_bytes", -1)) != header.original_length:
            raise ShardFormatError(
                f"manifest length_bytes={entries.get('length_bytes')} does not "
                f"match shard headers ({header.original_length})"
            )
        for field in ("q", "n", "k", "delta"):
            want = str(getattr(params, field))
            if entries.get(field) != want:
                raise ShardFormatError(
                    f"manifest {field}={entries.get(field)} does not match "
                    f"shard headers ({want})"
                )
        for j, crc in crcs.items():
            key = f"shard{j:02d}.crc32"
            if key in entries and entries[key] != f"{crc:08x}":
                raise ShardFormatError(
                    f"{names[j]}: crc32 {crc:08x} does not match manifest "
                    f"{entries[key]}"
                )
        print(f"manifest {args.manifest}: consistent")
    print(f"verify: OK ({len(payloads)} shards)")
    return 0


def cmd_params(args) -> int:
    params = derive_params(args.k, args.delta, args.n, q=args.q)
    print(params.describe())
    if args.compare:
        alt = comparison_subpacketization(params.n, params.delta)
        print()
        print("subpacketization comparison")
        print(f"this construction (alpha = (k-1) lcm(1..delta))  {params.alpha}")
        print(f"flat construction (lcm(1..delta) ** n)           {alt}")
        print(f"reduction factor                                 {alt // params.alpha}x")
    return 0


def cmd_simulate(args) -> int:
    params = derive_params(args.k, args.delta, args.n, q=args.q)
    policy = HelperPolicy.parse(args.policy)
    rng = np.random.default_rng(args.seed)
    source = rng.integers(0, params.q, size=args.stripes * params.file_symbols)
    cluster = Cluster(params)
    cluster.store(source)
    print(
        f"stored {args.stripes} stripes on {params.n} nodes "
        f"({params.alpha} symbols per node per stripe)"
    )
    for _ in range(args.rounds):
        f = int(rng.choice(cluster.alive_nodes()))
        cluster.fail_node(f)
        entry = cluster.run_repair(f, policy, int(rng.integers(2**32)))
        print(
            f"failed node {entry.failed}, repaired with d={entry.d} helpers "
            f"{list(entry.helpers)}, moved {entry.symbols_moved} symbols/stripe"
        )
    if cluster.read_all() != [int(v) % params.q for v in source]:
        print("error: data mismatch after repairs", file=sys.stderr)
        return 2
    print(f"data intact after {args.rounds} repairs")
    if args.csv:
        if args.csv == "-":
            sys.stdout.write(cluster.ledger_csv())
        else:
            shardio.atomic_write_bytes(args.csv, cluster.ledger_csv().encode())
            print(f"wrote traffic ledger to {args.csv}")
    return 0


def _add_code_flags(sub, require_n=True):
    sub.add_argument("--k", type=int, required=True, help="reconstruction threshold")
    sub.add_argument("--delta", type=int, required=True, help="flexibility degree")
    sub.add_argument("--n", type=int, required=require_n, help="node count")
    sub.add_argument("--q", type=int, default=None, help="field modulus (prime)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmba",
        description=(
            "Erasure-code files across n nodes so any k reconstruct and any "
            "failed node repairs exactly from d helpers, for every supported d."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="split a file into n shard files")
    p.add_argument("input", help="file to encode")
    p.add_argument("--out-dir", "-o", required=True, help="directory for shards")
    _add_code_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("reconstruct", help="rebuild the original file from k shards")
    p.add_argument("shards", nargs="+", help="shard files (k or more)")
    p.add_argument("--out", "-o", required=True, help="output file")
    p.add_argument(
        "--nodes",
        default=None,
        help="comma-separated node indices to decode from (default: lowest k)",
    )
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("repair", help="rebuild one lost shard from helper shards")
    p.add_argument("shards", nargs="+", help="helper shard files (count must be in D)")
    p.add_argument("--failed", "-f", type=int, required=True, help="failed node index")
    p.add_argument("--out", default=None, help="output shard file")
    p.add_argument(
        "--out-dir", default=None, help="directory for the derived output name"
    )
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("verify", help="check shard headers and payload checksums")
    p.add_argument("shards", nargs="+", help="shard files")
    p.add_argument("--manifest", default=None, help="manifest to check against")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("params", help="derive and print code parameters")
    actions = p.add_subparsers(dest="action", required=True)
    show = actions.add_parser("show", help="print all derived quantities")
    _add_code_flags(show)
    show.add_argument(
        "--compare",
        action="store_true",
        help="also compare subpacketization against a flat construction",
    )
    show.set_defaults(func=cmd_params)

    p = sub.add_parser("simulate", help="run a seeded failure/repair drill")
    _add_code_flags(p)
    p.add_argument("--stripes", type=int, default=4, help="stripes to store")
    p.add_argument("--rounds", type=int, default=3, help="failure/repair rounds")
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument(
        "--policy",
        default="max-d",
        help="helper count policy: max-d, min-d or fixed:<d>",
    )
    p.add_argument("--csv", default=None, help="write the traffic ledger here ('-' for stdout)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ShardFormatError, InconsistencyError, SingularMatrixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
