"""Arrange source symbols into the banded message matrix and encode nodes.

A stripe of F = k * alpha source symbols fills 2z symmetric (k-1) x (k-1)
blocks S_1 .. S_{2z}. Block column j of the assembled matrix M carries
S_{2j-2} above the diagonal block S_{2j-1} with S_{2j} below, and node j
stores the alpha-symbol product of its Vandermonde row with M. The band
shape is what lets both decoders peel one block pair per step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldElement
from .matrix import Matrix, build_gvm
from .params import CodeParams


@dataclass(frozen=True)
class MessageMatrix:
    blocks: tuple  # S_1 .. S_{2z}, each a symmetric (k-1) x (k-1) Matrix
    assembled: Matrix  # (z+1)(k-1) x z(k-1)


@dataclass(frozen=True)
class NodeShard:
    node_index: int
    eval_point: FieldElement
    symbols: tuple  # alpha FieldElement values

    def symbol_values(self) -> tuple:
        return tuple(s.value for s in self.symbols)


def coefficient_matrix(params: CodeParams) -> Matrix:
    """The n x (z+1)(k-1) encoding matrix; row j encodes node j."""
    points = [params.field.element(e) for e in params.eval_points]
    return build_gvm(points, 0, (params.z_delta + 1) * (params.k - 1))


def block_fill_order(k: int):
    """Within-block positions in fill order: upper triangle, row-major."""
    return [(r, c) for r in range(k - 1) for c in range(r, k - 1)]


def build_message_matrix(source, params: CodeParams) -> MessageMatrix:
    field = params.field
    vals = [int(s) % params.q for s in source]
    if len(vals) != params.file_symbols:
        raise ValueError(
            f"source must hold exactly F = {params.file_symbols} symbols, got {len(vals)}"
        )
    k, z = params.k, params.z_delta
    w = k - 1
    positions = block_fill_order(k)
    blocks = []
    it = iter(vals)
    for _ in range(2 * z):
        block = [[0] * w for _ in range(w)]
        for r, c in positions:
            v = next(it)
            block[r][c] = v
            block[c][r] = v
        blocks.append(Matrix(field, block))

    assembled = [[0] * (z * w) for _ in range((z + 1) * w)]

    def place(block: Matrix, block_row: int, block_col: int):
        for r in range(w):
            for c in range(w):
                assembled[block_row * w + r][block_col * w + c] = int(
                    block.data[r, c]
                )

    for j in range(1, z + 1):  # 1-based block column
        if j >= 2:
            place(blocks[2 * j - 3], j - 2, j - 1)  # S_{2j-2}
        place(blocks[2 * j - 2], j - 1, j - 1)  # S_{2j-1}
        place(blocks[2 * j - 1], j, j - 1)  # S_{2j}
    return MessageMatrix(blocks=tuple(blocks), assembled=Matrix(field, assembled))


def flatten_blocks(blocks, k: int) -> tuple:
    """Inverse of the fill order: blocks back to the flat source sequence."""
    positions = block_fill_order(k)
    out = []
    for block in blocks:
        for r, c in positions:
            out.append(block.entry(r, c))
    return tuple(out)


def encode_node(m: MessageMatrix, params: CodeParams, node_index: int) -> NodeShard:
    if not 1 <= node_index <= params.n:
        raise ValueError(f"node index must be in 1..{params.n}, got {node_index}")
    psi = coefficient_matrix(params)
    row = psi.submatrix(row_indices=[node_index - 1])
    product = row @ m.assembled
    symbols = tuple(product.entry(0, j) for j in range(params.alpha))
    return NodeShard(
        node_index=node_index,
        eval_point=params.eval_point(node_index),
        symbols=symbols,
    )


def encode_all(m: MessageMatrix, params: CodeParams) -> tuple:
    psi = coefficient_matrix(params)
    product = psi @ m.assembled
    shards = []
    for j in range(1, params.n + 1):
        symbols = tuple(product.entry(j - 1, c) for c in range(params.alpha))
        shards.append(
            NodeShard(node_index=j, eval_point=params.eval_point(j), symbols=symbols)
        )
    return tuple(shards)
