"""Batch codec between raw bytes and per-node symbol arrays.

File payloads are striped: every F consecutive symbols form one stripe that
is encoded independently. Encoding, reconstruction and repair are all
linear over the field, so each path extracts its linear map once (by
probing the stepwise single-stripe codec with unit vectors, or by
inverting the encoding map) and then applies it to every stripe in one
integer matrix product. Stripe zero of every batch is additionally pushed
through the stepwise codec and compared, so the fast path can never drift
from the reference one unnoticed.
"""

from __future__ import annotations

import numpy as np

from .encoder import NodeShard, build_message_matrix, encode_all
from .matrix import InconsistencyError, Matrix, invert
from .params import BYTE_SAFE_MIN_Q, CodeParams
from .reconstructor import reconstruct
from .repairer import RepairBundle, make_repair_bundle, repair, session_shape


def bytes_to_source(data: bytes, params: CodeParams) -> np.ndarray:
    """Map bytes one-to-one onto symbols, zero-padded to whole stripes."""
    if params.q < BYTE_SAFE_MIN_Q:
        raise ValueError(
            f"q = {params.q} cannot carry byte payloads; need q >= {BYTE_SAFE_MIN_Q}"
        )
    arr = np.frombuffer(data, dtype=np.uint8).astype(np.int64)
    f_sym = params.file_symbols
    stripes = (len(arr) + f_sym - 1) // f_sym
    padded = np.zeros(stripes * f_sym, dtype=np.int64)
    padded[: len(arr)] = arr
    return padded.reshape(stripes, f_sym)


def source_to_bytes(source: np.ndarray, original_length: int) -> bytes:
    flat = source.reshape(-1)
    if original_length > flat.size:
        raise ValueError(
            f"decoded stripes hold {flat.size} symbols, fewer than the "
            f"recorded length {original_length}"
        )
    head = flat[:original_length]
    if head.size and int(head.max()) > 255:
        raise InconsistencyError("decoded symbol exceeds byte range; data is corrupt")
    return head.astype(np.uint8).tobytes()


def _node_shards_from_rows(rows, nodes, params: CodeParams):
    return [
        NodeShard(
            node_index=j,
            eval_point=params.eval_point(j),
            symbols=params.field.elements(int(v) for v in row),
        )
        for j, row in zip(nodes, rows)
    ]


def encode_matrix(params: CodeParams) -> np.ndarray:
    """The (n*alpha) x F linear map from one stripe to all node shards."""
    f_sym = params.file_symbols
    out = np.zeros((params.n * params.alpha, f_sym), dtype=np.int64)
    unit = [0] * f_sym
    for i in range(f_sym):
        unit[i] = 1
        m = build_message_matrix(unit, params)
        unit[i] = 0
        col = []
        for shard in encode_all(m, params):
            col.extend(shard.symbol_values())
        out[:, i] = col
    return out


def encode_stripes(source: np.ndarray, params: CodeParams) -> np.ndarray:
    """Encode every stripe; result indexed [node-1, stripe, symbol]."""
    enc = encode_matrix(params)
    coded = (source @ enc.T) % params.q  # (stripes, n*alpha)
    out = coded.reshape(source.shape[0], params.n, params.alpha).transpose(1, 0, 2)
    if source.shape[0]:
        m = build_message_matrix([int(v) for v in source[0]], params)
        for shard in encode_all(m, params):
            if tuple(int(v) for v in out[shard.node_index - 1, 0]) != shard.symbol_values():
                raise InconsistencyError(
                    "batched and stepwise encoders disagree on stripe 0"
                )
    return out


def reconstruct_stripes(payloads: dict, params: CodeParams) -> np.ndarray:
    """Decode all stripes from exactly k node payloads of shape (stripes, alpha)."""
    nodes = sorted(payloads)
    if len(nodes) != params.k:
        raise ValueError(f"need exactly k = {params.k} node payloads, got {len(nodes)}")
    enc = encode_matrix(params)
    rows = []
    for j in nodes:
        rows.append(enc[(j - 1) * params.alpha : j * params.alpha])
    subset = np.concatenate(rows, axis=0)  # (k*alpha, F), square since alpha = F/k
    decode = invert(Matrix(params.field, subset)).data
    observed = np.concatenate([payloads[j] for j in nodes], axis=1)
    source = (observed @ decode.T) % params.q
    if source.shape[0]:
        shards = _node_shards_from_rows((payloads[j][0] for j in nodes), nodes, params)
        reference = tuple(s.value for s in reconstruct(shards, params))
        if tuple(int(v) for v in source[0]) != reference:
            raise InconsistencyError("batched and stepwise decoders disagree on stripe 0")
    return source


def repair_stripes(payloads: dict, f: int, params: CodeParams) -> np.ndarray:
    """Rebuild node f's payload for all stripes from d helper payloads."""
    helpers = sorted(payloads)
    d = len(helpers)
    seg, beta = session_shape(params, d)
    if f in payloads:
        raise ValueError(f"node {f} cannot appear among its own helpers")
    stripes = next(iter(payloads.values())).shape[0]

    e_f = params.eval_point(f)
    psi_f = np.array([(e_f**t).value for t in range(params.alpha)], dtype=np.int64)
    psi_seg = psi_f.reshape(beta, seg)
    stacked_helpers = np.stack([payloads[h] for h in helpers])  # (d, stripes, alpha)
    bundles = (
        np.einsum("hsbt,bt->hsb", stacked_helpers.reshape(d, stripes, beta, seg), psi_seg)
        % params.q
    )

    # Probe the stepwise decoder with unit bundles to extract its matrix.
    zero = params.field.zero()
    one = params.field.one()
    decode = np.zeros((params.alpha, d * beta), dtype=np.int64)
    for u in range(d * beta):
        probe = []
        for h_idx, h in enumerate(helpers):
            symbols = tuple(
                one if h_idx * beta + step == u else zero for step in range(beta)
            )
            probe.append(
                RepairBundle(helper_index=h, failed_index=f, d=d, symbols=symbols)
            )
        decode[:, u] = repair(f, probe, params).symbol_values()

    flat = bundles.transpose(1, 0, 2).reshape(stripes, d * beta)
    rebuilt = (flat @ decode.T) % params.q
    if stripes:
        shards = _node_shards_from_rows(
            (payloads[h][0] for h in helpers), helpers, params
        )
        probe = [make_repair_bundle(s, f, d, params) for s in shards]
        reference = repair(f, probe, params).symbol_values()
        if tuple(int(v) for v in rebuilt[0]) != reference:
            raise InconsistencyError("batched and stepwise repair disagree on stripe 0")
    return rebuilt
