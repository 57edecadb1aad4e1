"""Encode twelve symbols onto seven nodes, then rebuild them from any three.

The file here is the alphabet of symbols 1..12 so every intermediate value
is easy to follow by eye. After encoding, each node holds four symbols and
any k = 3 of the seven nodes are enough to get the twelve back.
"""

import itertools

from pmba.encoder import build_message_matrix, encode_all
from pmba.params import derive_params
from pmba.reconstructor import reconstruct

PARAMS = derive_params(3, 2, 7, q=23)


def run():
    source = list(range(1, 13))
    print(f"source symbols: {source}")
    print(f"code: n = {PARAMS.n}, k = {PARAMS.k}, q = {PARAMS.q}, "
          f"alpha = {PARAMS.alpha}")
    print()

    m = build_message_matrix(source, PARAMS)
    shards = encode_all(m, PARAMS)
    for shard in shards:
        print(f"node {shard.node_index} (point {shard.eval_point.value:2d}) "
              f"stores {list(shard.symbol_values())}")
    print()

    by_index = {s.node_index: s for s in shards}
    chosen = (2, 5, 7)
    decoded = [s.value for s in reconstruct([by_index[j] for j in chosen], PARAMS)]
    print(f"nodes {chosen} decode to: {decoded}")
    assert decoded == source

    agree = 0
    for subset in itertools.combinations(range(1, 8), 3):
        got = [s.value for s in reconstruct([by_index[j] for j in subset], PARAMS)]
        assert got == source, subset
        agree += 1
    print(f"all {agree} three-node subsets decode to the same source")


if __name__ == "__main__":
    run()
