"""Shard a real file on disk, lose several shards, and bring them all back.

Runs the command-line interface in-process, printing each invocation as
the shell command it corresponds to. Uses a scratch directory under /tmp
and cleans it up afterwards.
"""

import tempfile
from pathlib import Path

import numpy as np

from pmba.cli import main


def call(*argv):
    print("$ pmba " + " ".join(argv))
    rc = main(list(argv))
    assert rc == 0, f"exit code {rc}"
    print()


if __name__ == "__main__":
    with tempfile.TemporaryDirectory(prefix="sharding-demo-") as tmp:
        tmp = Path(tmp)
        payload = tmp / "archive.bin"
        payload.write_bytes(bytes(
            np.random.default_rng(12).integers(0, 256, size=100_000, dtype=np.uint8)
        ))
        print(f"payload: {payload} ({payload.stat().st_size} bytes)")
        print()

        shards = tmp / "shards"
        call("encode", str(payload), "--out-dir", str(shards),
             "--k", "3", "--delta", "2", "--n", "7")

        call("verify", *(str(p) for p in sorted(shards.glob("*.shard*"))),
             "--manifest", str(shards / "archive.bin.manifest"))

        # Pretend nodes 5, 6 and 7 burned down; four shards survive.
        for j in (5, 6, 7):
            (shards / f"archive.bin.shard{j:02d}").unlink()
        print("deleted shards 05, 06 and 07")
        print()

        # The file itself was never in danger: any three shards rebuild it.
        restored = tmp / "restored.bin"
        call("reconstruct", *sorted(str(p) for p in shards.glob("*.shard*")),
             "--out", str(restored))
        assert restored.read_bytes() == payload.read_bytes()
        print("restored file matches the original byte for byte")
        print()

        # Re-grow the lost shards one at a time. The first two repairs can
        # only use d = 4 helpers; for the last one six nodes are already
        # back, so it runs in the cheaper d = 6 mode instead.
        def alive():
            return sorted(str(p) for p in shards.glob("*.shard*"))

        call("repair", *alive()[:4], "--failed", "5",
             "--out-dir", str(shards))
        call("repair", *alive()[:4], "--failed", "6",
             "--out-dir", str(shards))
        call("repair", *alive()[:6], "--failed", "7",
             "--out-dir", str(shards))

        call("verify", *alive(),
             "--manifest", str(shards / "archive.bin.manifest"))
        print("all seven shards are back and match the original checksums")
