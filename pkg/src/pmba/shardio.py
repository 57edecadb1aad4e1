"""Binary shard files and the plain-text manifest sidecar.

A shard file is a fixed header (magic, version, code parameters, node
identity, stripe count, original byte length, evaluation points) followed
by stripe_count * alpha symbols of two little-endian bytes each. Any k
shard files whose headers match except for the node index are mutually
decodable. Writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import CodeParams, derive_params

MAGIC = b"PMBA"
FORMAT_VERSION = 1
_FIXED = struct.Struct("<4sBHHHHIQQ")
MAX_HEADER_Q = 65535  # q occupies two bytes, as does every payload symbol


class ShardFormatError(ValueError):
    """A shard or manifest file is malformed or inconsistent."""


@dataclass(frozen=True)
class ShardHeader:
    q: int
    n: int
    k: int
    delta: int
    node_index: int
    stripe_count: int
    original_length: int
    eval_points: tuple

    def code_key(self) -> tuple:
        """Everything that must match across mutually decodable shards."""
        return (
            self.q,
            self.n,
            self.k,
            self.delta,
            self.stripe_count,
            self.original_length,
            self.eval_points,
        )


def header_for(
    params: CodeParams, node_index: int, stripe_count: int, original_length: int
) -> ShardHeader:
    if params.q > MAX_HEADER_Q:
        raise ValueError(
            f"q = {params.q} does not fit the two-byte shard header field "
            f"(max {MAX_HEADER_Q})"
        )
    return ShardHeader(
        q=params.q,
        n=params.n,
        k=params.k,
        delta=params.delta,
        node_index=node_index,
        stripe_count=stripe_count,
        original_length=original_length,
        eval_points=params.eval_points,
    )


def shard_params(header: ShardHeader) -> CodeParams:
    try:
        return derive_params(
            header.k,
            header.delta,
            header.n,
            q=header.q,
            eval_points=header.eval_points,
        )
    except ValueError as exc:
        raise ShardFormatError(f"shard header is invalid: {exc}") from None


def pack_header(header: ShardHeader) -> bytes:
    fixed = _FIXED.pack(
        MAGIC,
        FORMAT_VERSION,
        header.q,
        header.n,
        header.k,
        header.delta,
        header.node_index,
        header.stripe_count,
        header.original_length,
    )
    points = struct.pack(f"<{header.n}H", *header.eval_points)
    return fixed + points


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_shard(path, header: ShardHeader, symbols: np.ndarray) -> None:
    """symbols: (stripe_count, alpha) array of values < q."""
    params = shard_params(header)
    expected = (header.stripe_count, params.alpha)
    if symbols.shape != expected:
        raise ValueError(f"payload shape {symbols.shape} does not match {expected}")
    if symbols.size and int(symbols.max()) >= header.q:
        raise ValueError(f"payload symbol >= q = {header.q}")
    payload = symbols.astype("<u2").tobytes()
    atomic_write_bytes(path, pack_header(header) + payload)


def read_shard(path):
    """Returns (header, symbols) after validating the whole file."""
    blob = Path(path).read_bytes()
    if len(blob) < _FIXED.size:
        raise ShardFormatError(f"{path}: too short to be a shard file")
    magic, version, q, n, k, delta, node_index, stripe_count, original_length = (
        _FIXED.unpack_from(blob)
    )
    if magic != MAGIC:
        raise ShardFormatError(f"{path}: not a shard file (bad magic)")
    if version != FORMAT_VERSION:
        raise ShardFormatError(f"{path}: unsupported format version {version}")
    points_end = _FIXED.size + 2 * n
    if len(blob) < points_end:
        raise ShardFormatError(f"{path}: truncated evaluation-point table")
    eval_points = struct.unpack_from(f"<{n}H", blob, _FIXED.size)
    header = ShardHeader(
        q=q,
        n=n,
        k=k,
        delta=delta,
        node_index=node_index,
        stripe_count=stripe_count,
        original_length=original_length,
        eval_points=eval_points,
    )
    params = shard_params(header)
    if not 1 <= node_index <= n:
        raise ShardFormatError(f"{path}: node index {node_index} outside 1..{n}")
    payload = blob[points_end:]
    expected = stripe_count * params.alpha * 2
    if len(payload) != expected:
        raise ShardFormatError(
            f"{path}: payload holds {len(payload)} bytes, header promises {expected}"
        )
    symbols = (
        np.frombuffer(payload, dtype="<u2")
        .astype(np.int64)
        .reshape(stripe_count, params.alpha)
    )
    if symbols.size and int(symbols.max()) >= q:
        raise ShardFormatError(f"{path}: payload symbol >= q = {q}")
    return header, symbols


def payload_crc(symbols: np.ndarray) -> int:
    return zlib.crc32(symbols.astype("<u2").tobytes()) & 0xFFFFFFFF


def write_manifest(path, original_name: str, params: CodeParams, header0: ShardHeader, shard_entries) -> None:
    """shard_entries: iterable of (node_index, file_name, crc32)."""
    lines = [
        f"file={original_name}",
        f"length_bytes={header0.original_length}",
        f"q={params.q}",
        f"n={params.n}",
        f"k={params.k}",
        f"delta={params.delta}",
    ]
    for node_index, file_name, crc in shard_entries:
        lines.append(f"shard{node_index:02d}.file={file_name}")
        lines.append(f"shard{node_index:02d}.crc32={crc:08x}")
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode())


def read_manifest(path) -> dict:
    entries = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if "=" not in line:
            raise ShardFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries
