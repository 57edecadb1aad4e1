# tests/test_cli.py
#
# Every test drives main(argv) in-process and checks exit codes, streams
# and the bytes that land on disk. Exit codes: 0 ok, 1 usage, 2 bad data.
import shutil

import numpy as np
import pytest

from pmba.cli import main
from pmba.cluster import CSV_HEADER
from pmba.shardio import read_shard, write_shard

CODE_FLAGS = ["--k", "3", "--delta", "2", "--n", "7"]


@pytest.fixture(scope="module")
def encoded(tmp_path_factory):
    """A 1000-byte file encoded once; tests copy what they mutate."""
    root = tmp_path_factory.mktemp("enc")
    data = bytes(np.random.default_rng(47).integers(0, 256, size=1000, dtype=np.uint8))
    src = root / "data.bin"
    src.write_bytes(data)
    out_dir = root / "shards"
    rc = main(["encode", str(src), "--out-dir", str(out_dir), *CODE_FLAGS])
    assert rc == 0
    return data, src, out_dir


def shard_path(out_dir, j):
    return out_dir / f"data.bin.shard{j:02d}"


# ---------------------------------------------------------------------------
# encode
# ---------------------------------------------------------------------------


def test_encode_writes_all_shards_and_a_manifest(encoded, capsys):
    data, src, out_dir = encoded
    capsys.readouterr()
    for j in range(1, 8):
        assert shard_path(out_dir, j).is_file()
    assert (out_dir / "data.bin.manifest").is_file()
    header, symbols = read_shard(shard_path(out_dir, 1))
    assert (header.q, header.n, header.k, header.delta) == (257, 7, 3, 2)
    assert header.original_length == 1000
    assert header.stripe_count == 84  # ceil(1000 / 12)
    assert symbols.shape == (84, 4)


def test_encode_reports_progress(tmp_path, capsys):
    src = tmp_path / "tiny.bin"
    src.write_bytes(b"abc")
    rc = main(["encode", str(src), "-o", str(tmp_path / "out"), *CODE_FLAGS])
    out = capsys.readouterr().out
    assert rc == 0
    assert "encoded 3 bytes into 7 shards" in out
    assert out.count("wrote") == 8  # 7 shards + 1 manifest


def test_encode_refuses_q_too_large_for_the_header(tmp_path, capsys):
    src = tmp_path / "x.bin"
    src.write_bytes(b"x")
    rc = main(
        ["encode", str(src), "-o", str(tmp_path), "--k", "3", "--delta", "2",
         "--n", "7", "--q", "65537"]
    )
    assert rc == 1
    assert "does not fit the two-byte shard header field" in capsys.readouterr().err


def test_encode_refuses_q_too_small_for_bytes(tmp_path, capsys):
    src = tmp_path / "x.bin"
    src.write_bytes(b"x")
    rc = main(
        ["encode", str(src), "-o", str(tmp_path), "--k", "3", "--delta", "2",
         "--n", "7", "--q", "11"]
    )
    assert rc == 1
    assert "cannot carry byte payloads" in capsys.readouterr().err


def test_encode_refuses_composite_q(tmp_path, capsys):
    src = tmp_path / "x.bin"
    src.write_bytes(b"x")
    rc = main(
        ["encode", str(src), "-o", str(tmp_path), "--k", "3", "--delta", "2",
         "--n", "7", "--q", "1000"]
    )
    assert rc == 1
    assert "q must be prime" in capsys.readouterr().err


def test_encode_missing_input_file(tmp_path, capsys):
    rc = main(["encode", str(tmp_path / "ghost.bin"), "-o", str(tmp_path), *CODE_FLAGS])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------


def test_reconstruct_defaults_to_the_lowest_k_nodes(encoded, tmp_path, capsys):
    data, _, out_dir = encoded
    out = tmp_path / "back.bin"
    shards = [str(shard_path(out_dir, j)) for j in range(1, 8)]
    rc = main(["reconstruct", *shards, "--out", str(out)])
    assert rc == 0
    assert out.read_bytes() == data
    assert "from nodes [1, 2, 3]" in capsys.readouterr().out


def test_reconstruct_from_any_chosen_k_subset(encoded, tmp_path):
    data, _, out_dir = encoded
    for nodes in ((2, 5, 7), (1, 4, 6), (3, 5, 6)):
        out = tmp_path / ("back" + "".join(map(str, nodes)))
        shards = [str(shard_path(out_dir, j)) for j in nodes]
        rc = main(
            ["reconstruct", *shards, "-o", str(out), "--nodes", ",".join(map(str, nodes))]
        )
        assert rc == 0
        assert out.read_bytes() == data


def test_reconstruct_node_selection_errors(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    shards = [str(shard_path(out_dir, j)) for j in (1, 2, 4)]
    out = str(tmp_path / "o")

    rc = main(["reconstruct", *shards, "-o", out, "--nodes", "1,2"])
    assert rc == 1
    assert "pick exactly k = 3 nodes, got 2" in capsys.readouterr().err

    rc = main(["reconstruct", *shards, "-o", out, "--nodes", "1,2,5"])
    assert rc == 1
    assert "requested nodes [5] are not among the given shards [1, 2, 4]" in (
        capsys.readouterr().err
    )

    rc = main(["reconstruct", shards[0], shards[1], "-o", out])
    assert rc == 1
    assert "need at least k = 3 shard files, got 2" in capsys.readouterr().err


def test_reconstruct_deduplicates_repeated_files(encoded, tmp_path):
    data, _, out_dir = encoded
    out = tmp_path / "dedup.bin"
    shards = [str(shard_path(out_dir, j)) for j in (1, 1, 2, 3)]
    rc = main(["reconstruct", *shards, "-o", str(out)])
    assert rc == 0
    assert out.read_bytes() == data


def test_conflicting_duplicates_are_a_data_error(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    imposter = tmp_path / "data.bin.shard01"
    header, symbols = read_shard(shard_path(out_dir, 1))
    forged = symbols.copy()
    forged[0, 0] = (forged[0, 0] + 1) % header.q
    write_shard(imposter, header, forged)
    rc = main(
        ["reconstruct", str(shard_path(out_dir, 1)), str(imposter),
         str(shard_path(out_dir, 2)), str(shard_path(out_dir, 3)),
         "-o", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "both claim node 1 but differ" in capsys.readouterr().err


def test_mixed_encodings_are_refused(encoded, tmp_path, capsys):
    data, src, out_dir = encoded
    other_dir = tmp_path / "other"
    rc = main(
        ["encode", str(src), "-o", str(other_dir), "--k", "3", "--delta", "1", "--n", "7"]
    )
    assert rc == 0
    capsys.readouterr()
    rc = main(
        ["reconstruct", str(shard_path(out_dir, 1)), str(shard_path(out_dir, 2)),
         str(other_dir / "data.bin.shard03"), "-o", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "not from the same encoding" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# repair
# ---------------------------------------------------------------------------


def test_repair_rebuilds_a_byte_identical_shard(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    original = shard_path(out_dir, 7).read_bytes()

    four = [str(shard_path(out_dir, j)) for j in (1, 2, 3, 4)]
    out_a = tmp_path / "from_four.shard07"
    rc = main(["repair", *four, "--failed", "7", "--out", str(out_a)])
    assert rc == 0
    assert out_a.read_bytes() == original
    assert "repaired node 7 from 4 helpers" in capsys.readouterr().out

    six = [str(shard_path(out_dir, j)) for j in (1, 2, 3, 4, 5, 6)]
    out_b = tmp_path / "from_six.shard07"
    rc = main(["repair", *six, "-f", "7", "--out", str(out_b)])
    assert rc == 0
    assert out_b.read_bytes() == original


def test_repair_derives_the_output_name(encoded, tmp_path):
    _, _, out_dir = encoded
    four = [str(shard_path(out_dir, j)) for j in (2, 3, 5, 6)]
    rc = main(["repair", *four, "-f", "4", "--out-dir", str(tmp_path)])
    assert rc == 0
    derived = tmp_path / "data.bin.shard04"
    assert derived.read_bytes() == shard_path(out_dir, 4).read_bytes()


def test_repair_needs_out_when_names_give_no_pattern(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    helpers = []
    for letter, j in zip("abcd", (1, 2, 3, 4)):
        p = tmp_path / f"helper_{letter}"
        shutil.copyfile(shard_path(out_dir, j), p)
        helpers.append(str(p))
    rc = main(["repair", *helpers, "-f", "7"])
    assert rc == 1
    assert "pass --out explicitly" in capsys.readouterr().err


def test_repair_helper_count_must_be_supported(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    five = [str(shard_path(out_dir, j)) for j in (1, 2, 3, 4, 5)]
    rc = main(["repair", *five, "-f", "7", "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "valid D = {4, 6}" in capsys.readouterr().err


def test_repair_argument_errors(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    four = [str(shard_path(out_dir, j)) for j in (1, 2, 3, 4)]

    rc = main(["repair", *four, "-f", "9", "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "failed index must be in 1..7" in capsys.readouterr().err

    rc = main(["repair", *four, "-f", "2", "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "cannot appear among its own helpers" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_reports_ok_with_manifest(encoded, capsys):
    _, _, out_dir = encoded
    shards = [str(shard_path(out_dir, j)) for j in range(1, 8)]
    manifest = str(out_dir / "data.bin.manifest")
    rc = main(["verify", *shards, "--manifest", manifest])
    out = capsys.readouterr().out
    assert rc == 0
    assert "verify: OK (7 shards)" in out
    assert f"manifest {manifest}: consistent" in out
    assert out.count("ok") >= 7


def test_verify_catches_a_corrupted_payload(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    work = tmp_path / "copy"
    work.mkdir()
    for j in (1, 2, 3):
        shutil.copyfile(shard_path(out_dir, j), work / shard_path(out_dir, j).name)
    shutil.copyfile(out_dir / "data.bin.manifest", work / "data.bin.manifest")

    victim = work / "data.bin.shard02"
    header, symbols = read_shard(victim)
    symbols = symbols.copy()
    symbols[3, 1] = (symbols[3, 1] + 1) % header.q
    write_shard(victim, header, symbols)

    rc = main(
        ["verify", *(str(work / f"data.bin.shard{j:02d}") for j in (1, 2, 3)),
         "--manifest", str(work / "data.bin.manifest")]
    )
    assert rc == 2
    assert "does not match manifest" in capsys.readouterr().err


def test_verify_rejects_a_foreign_manifest(encoded, tmp_path, capsys):
    _, src, out_dir = encoded
    other = tmp_path / "other"
    assert main(["encode", str(src), "-o", str(other), "--k", "2", "--delta", "2", "--n", "5"]) == 0
    capsys.readouterr()
    rc = main(
        ["verify", str(shard_path(out_dir, 1)),
         "--manifest", str(other / "data.bin.manifest")]
    )
    assert rc == 2
    assert "does not match shard headers" in capsys.readouterr().err


def test_verify_flags_truncated_shards(encoded, tmp_path, capsys):
    _, _, out_dir = encoded
    crippled = tmp_path / "data.bin.shard01"
    crippled.write_bytes(shard_path(out_dir, 1).read_bytes()[:-3])
    rc = main(["verify", str(crippled)])
    assert rc == 2
    assert "payload holds" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------


def test_params_show_prints_every_derived_quantity(capsys):
    rc = main(["params", "show", "--k", "3", "--delta", "2", "--n", "7", "--q", "11"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "symbols per node (alpha)" in out
    assert "{4, 6}" in out
    assert "{4->2, 6->1}" in out
    assert "{4->8, 6->6}" in out


def test_params_compare_table(capsys):
    rc = main(
        ["params", "show", "--k", "3", "--delta", "2", "--n", "14", "--q", "17",
         "--compare"]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "subpacketization comparison" in out
    assert "this construction (alpha = (k-1) lcm(1..delta))  4" in out
    assert "flat construction (lcm(1..delta) ** n)           16384" in out
    assert "reduction factor                                 4096x" in out


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_runs_a_seeded_drill_with_csv_on_stdout(capsys):
    rc = main(
        ["simulate", "--k", "3", "--delta", "2", "--n", "7", "--q", "11",
         "--stripes", "2", "--rounds", "3", "--seed", "5", "--csv", "-"]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "stored 2 stripes on 7 nodes" in out
    assert "data intact after 3 repairs" in out
    lines = out.splitlines()
    rows = lines[lines.index(CSV_HEADER) + 1 :]
    assert len(rows) == 3
    for row in rows:
        stripe_count, f, d, helpers, moved = row.split(",")
        assert stripe_count == "2"
        assert int(d) in (4, 6)
        assert len(helpers.split(";")) == int(d)
        assert int(moved) == {4: 8, 6: 6}[int(d)]


def test_simulate_is_reproducible(capsys):
    argv = ["simulate", "--k", "3", "--delta", "2", "--n", "7", "--q", "11",
            "--seed", "9", "--csv", "-"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_simulate_writes_csv_files(tmp_path, capsys):
    csv_path = tmp_path / "ledger.csv"
    rc = main(
        ["simulate", "--k", "3", "--delta", "2", "--n", "7", "--q", "11",
         "--rounds", "2", "--csv", str(csv_path)]
    )
    assert rc == 0
    text = csv_path.read_text()
    assert text.startswith(CSV_HEADER + "\n")
    assert len(text.strip().splitlines()) == 3


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def test_usage_errors_exit_one(capsys):
    assert main(["defragment"]) == 1
    assert main([]) == 1
    assert main(["encode"]) == 1  # missing input and flags
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "encode" in capsys.readouterr().out
