"""Product-matrix MSR erasure code with bandwidth-adaptive exact repair.

Encode a stripe of F = k * alpha symbols across n nodes so that any k
nodes reconstruct it and any single failed node is rebuilt exactly from
any d helpers, for every d in D = {2(k-1), ..., (delta+1)(k-1)}, with each
helper sending only alpha / (d-k+1) symbols.
"""

from .cluster import CSV_HEADER, Cluster, HelperPolicy, LedgerEntry
from .encoder import (
    MessageMatrix,
    NodeShard,
    build_message_matrix,
    coefficient_matrix,
    encode_all,
    encode_node,
)
from .field import FieldElement, PrimeField, is_prime, smallest_prime_geq
from .matrix import (
    InconsistencyError,
    Matrix,
    SingularMatrixError,
    build_gvm,
    invert,
    mat_mul,
    solve_symmetric_pair,
    transpose,
)
from .params import (
    CodeParams,
    comparison_subpacketization,
    derive_params,
    lcm_upto,
)
from .reconstructor import ReconstructionSession, reconstruct
from .repairer import RepairBundle, make_repair_bundle, repair, session_shape
from .shardio import ShardFormatError, ShardHeader, read_shard, write_shard

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "Cluster",
    "CodeParams",
    "FieldElement",
    "HelperPolicy",
    "InconsistencyError",
    "LedgerEntry",
    "Matrix",
    "MessageMatrix",
    "NodeShard",
    "PrimeField",
    "ReconstructionSession",
    "RepairBundle",
    "ShardFormatError",
    "ShardHeader",
    "SingularMatrixError",
    "build_gvm",
    "build_message_matrix",
    "coefficient_matrix",
    "comparison_subpacketization",
    "derive_params",
    "encode_all",
    "encode_node",
    "invert",
    "is_prime",
    "lcm_upto",
    "make_repair_bundle",
    "mat_mul",
    "read_shard",
    "reconstruct",
    "repair",
    "session_shape",
    "smallest_prime_geq",
    "solve_symmetric_pair",
    "transpose",
    "write_shard",
]
