# tests/test_reconstructor.py
import itertools

import numpy as np
import pytest

import pmba.reconstructor as reconstructor_module
from pmba.encoder import NodeShard, build_message_matrix, encode_all
from pmba.params import derive_params
from pmba.reconstructor import ReconstructionSession, reconstruct

WORKED = derive_params(3, 2, 7, q=11)


def encoded(source, params=WORKED):
    return encode_all(build_message_matrix(source, params), params)


def pick(shards, nodes):
    return [shards[j - 1] for j in nodes]


def power_collisions(params):
    """Node pairs whose evaluation points share a (k-1)-th power."""
    by_power = {}
    for j in range(1, params.n + 1):
        lam = (params.eval_point(j) ** (params.k - 1)).value
        by_power.setdefault(lam, []).append(j)
    return [tuple(nodes) for nodes in by_power.values() if len(nodes) > 1]


# ---------------------------------------------------------------------------
# the worked three-node session
# ---------------------------------------------------------------------------


def test_session_for_nodes_1_2_4():
    shards = pick(encoded(range(1, 13)), (1, 2, 4))
    session = ReconstructionSession(shards, WORKED)
    assert session.accessed_nodes == (1, 2, 4)
    # squares of the points 1, 2, 4
    assert session.lambda_dc.to_lists() == [[1, 0, 0], [0, 4, 0], [0, 0, 5]]
    got = [int(s) for s in session.run()]
    assert got == [v % 11 for v in range(1, 13)]


def test_zero_shards_give_zero_source():
    shards = pick(encoded([0] * 12), (2, 3, 7))
    assert all(int(s) == 0 for s in reconstruct(shards, WORKED))


def test_output_is_independent_of_shard_order():
    shards = pick(encoded(range(1, 13)), (1, 2, 4))
    base = reconstruct(shards, WORKED)
    for perm in itertools.permutations(shards):
        assert reconstruct(list(perm), WORKED) == base


# ---------------------------------------------------------------------------
# which node subsets can decode
# ---------------------------------------------------------------------------


def test_subsets_with_distinct_point_powers_decode_and_the_rest_refuse():
    # Over F_11 squaring folds x and 11-x together, so with points 1..7
    # the pairs {4,7} and {5,6} share a square. Any access set holding
    # such a pair has lost information and must be refused up front.
    collisions = power_collisions(WORKED)
    assert sorted(collisions) == [(4, 7), (5, 6)]
    rng = np.random.default_rng(31)
    source = [int(v) for v in rng.integers(0, 11, size=12)]
    shards = encoded(source)
    decodable, refused = [], []
    for subset in itertools.combinations(range(1, 8), 3):
        has_collision = any(
            set(pair) <= set(subset) for pair in collisions
        )
        if has_collision:
            with pytest.raises(ValueError, match=r"\(k-1\)-th power"):
                reconstruct(pick(shards, subset), WORKED)
            refused.append(subset)
        else:
            got = [int(s) for s in reconstruct(pick(shards, subset), WORKED)]
            assert got == source, subset
            decodable.append(subset)
    assert len(decodable) == 25
    assert len(refused) == 10


def test_all_35_subsets_decode_once_the_powers_are_distinct():
    # same seven points over F_23: squares 1,4,9,16,2,13,3 are pairwise
    # distinct, so every 3-subset decodes
    params = derive_params(3, 2, 7, q=23)
    assert power_collisions(params) == []
    rng = np.random.default_rng(33)
    source = [int(v) for v in rng.integers(0, 23, size=12)]
    shards = encoded(source, params)
    for subset in itertools.combinations(range(1, 8), 3):
        got = [int(s) for s in reconstruct(pick(shards, subset), params)]
        assert got == source, subset


def test_thirteen_node_instance_decodes_from_sampled_subsets():
    params = derive_params(4, 3, 13, q=17)
    assert power_collisions(params) == []  # cubing is a bijection mod 17
    rng = np.random.default_rng(37)
    source = [int(v) for v in rng.integers(0, 17, size=params.file_symbols)]
    shards = encoded(source, params)
    for _ in range(20):
        subset = sorted(rng.choice(range(1, 14), size=4, replace=False))
        got = [int(s) for s in reconstruct(pick(shards, subset), params)]
        assert got == source, subset


def test_single_step_decoding_when_only_one_helper_count_exists():
    # delta=1 means one block pair and exactly one solver call
    params = derive_params(3, 1, 5, q=11)
    assert params.z_delta == 1
    rng = np.random.default_rng(41)
    source = [int(v) for v in rng.integers(0, 11, size=params.file_symbols)]
    shards = encoded(source, params)

    calls = []
    original = reconstructor_module.solve_symmetric_pair

    def counting(*args, **kwargs):
        calls.append(1)
        return original(*args, **kwargs)

    reconstructor_module.solve_symmetric_pair = counting
    try:
        got = [int(s) for s in reconstruct(pick(shards, (1, 3, 5)), params)]
    finally:
        reconstructor_module.solve_symmetric_pair = original
    assert got == source
    assert len(calls) == 1


# ---------------------------------------------------------------------------
# data model: erasures only
# ---------------------------------------------------------------------------


def test_a_corrupted_shard_decodes_to_wrong_symbols_without_raising():
    # with exactly k shards there is no redundancy left to detect errors;
    # a flipped symbol yields a wrong stripe, not an exception. End-to-end
    # integrity comes from the file-level checksums.
    source = list(range(1, 13))
    shards = pick(encoded(source), (1, 2, 4))
    bad = shards[0]
    tampered = list(bad.symbols)
    tampered[2] = tampered[2] + 1
    shards[0] = NodeShard(
        node_index=bad.node_index,
        eval_point=bad.eval_point,
        symbols=tuple(tampered),
    )
    got = [int(s) for s in reconstruct(shards, WORKED)]
    assert got != [v % 11 for v in source]


# ---------------------------------------------------------------------------
# input validation
# ---------------------------------------------------------------------------


def test_wrong_shard_count_is_rejected():
    shards = encoded(range(1, 13))
    with pytest.raises(ValueError, match="k = 3"):
        reconstruct(pick(shards, (1, 2)), WORKED)
    with pytest.raises(ValueError, match="k = 3"):
        reconstruct(pick(shards, (1, 2, 3, 4)), WORKED)


def test_duplicate_nodes_are_rejected():
    shards = encoded(range(1, 13))
    with pytest.raises(ValueError, match="distinct"):
        reconstruct(pick(shards, (1, 2, 2)), WORKED)


def test_wrong_symbol_count_is_rejected():
    shards = pick(encoded(range(1, 13)), (1, 2, 4))
    short = NodeShard(
        node_index=1, eval_point=WORKED.eval_point(1), symbols=shards[0].symbols[:3]
    )
    with pytest.raises(ValueError, match="alpha = 4"):
        reconstruct([short, shards[1], shards[2]], WORKED)


def test_shard_with_a_forged_evaluation_point_is_rejected():
    shards = pick(encoded(range(1, 13)), (1, 2, 4))
    forged = NodeShard(
        node_index=1, eval_point=WORKED.eval_point(2), symbols=shards[0].symbols
    )
    with pytest.raises(ValueError, match="evaluation point"):
        reconstruct([forged, shards[1], shards[2]], WORKED)


def test_node_index_outside_the_code_is_rejected():
    shards = pick(encoded(range(1, 13)), (1, 2, 4))
    alien = NodeShard(
        node_index=9, eval_point=WORKED.field.element(9), symbols=shards[0].symbols
    )
    with pytest.raises(ValueError, match="outside"):
        reconstruct([alien, shards[1], shards[2]], WORKED)
