"""Derive every code parameter from the two design inputs k and delta.

The code stores alpha = (k-1) * lcm(1..delta) symbols per node so that a
failed node can be rebuilt from any d in D = {2(k-1), ..., (delta+1)(k-1)}
helpers with each helper sending exactly alpha / (d-k+1) symbols. All other
quantities follow from those two choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

from .field import PrimeField, smallest_prime_geq

BYTE_SAFE_MIN_Q = 257  # one byte per symbol stays injective from here up


def lcm_upto(delta: int) -> int:
    """lcm(1, 2, ..., delta)."""
    if delta < 1:
        raise ValueError(f"delta must satisfy delta >= 1, got {delta}")
    return math.lcm(*range(1, delta + 1))


def comparison_subpacketization(n: int, delta: int) -> int:
    """Per-node symbol count a flat construction needs for the same flexibility.

    Parity-check based designs that support several helper counts at once
    pay lcm(1..delta) ** n symbols per node, exponential in the cluster
    size, versus (k-1) * lcm(1..delta) here. Used for reporting only.
    """
    if n < 1:
        raise ValueError(f"n must satisfy n >= 1, got {n}")
    return lcm_upto(delta) ** n


@dataclass(frozen=True)
class CodeParams:
    """Immutable bundle of the derived code parameters."""

    n: int
    k: int
    delta: int
    q: int
    z_delta: int
    alpha: int
    file_symbols: int
    helper_counts: tuple
    per_node_bandwidth: dict
    total_bandwidth: dict
    eval_points: tuple
    field: PrimeField = dc_field(repr=False, compare=False, default=None)

    def eval_point(self, node_index: int):
        """Evaluation point of 1-based node node_index, as a FieldElement."""
        if not 1 <= node_index <= self.n:
            raise ValueError(f"node index must be in 1..{self.n}, got {node_index}")
        return self.field.element(self.eval_points[node_index - 1])

    def describe(self) -> str:
        """Aligned key/value text of every derived quantity."""
        beta = ", ".join(f"{d}->{b}" for d, b in sorted(self.per_node_bandwidth.items()))
        gamma = ", ".join(f"{d}->{g}" for d, g in sorted(self.total_bandwidth.items()))
        lines = [
            ("nodes (n)", self.n),
            ("reconstruction threshold (k)", self.k),
            ("flexibility degree (delta)", self.delta),
            ("field modulus (q)", self.q),
            ("lcm(1..delta) (z)", self.z_delta),
            ("symbols per node (alpha)", self.alpha),
            ("symbols per stripe (F)", self.file_symbols),
            ("helper counts (D)", "{" + ", ".join(map(str, self.helper_counts)) + "}"),
            ("per-helper symbols (beta)", "{" + beta + "}"),
            ("repair traffic (gamma)", "{" + gamma + "}"),
            ("evaluation points", ", ".join(map(str, self.eval_points))),
        ]
        width = max(len(name) for name, _ in lines)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in lines)


def derive_params(
    k: int, delta: int, n: int, q: int | None = None, eval_points=None
) -> CodeParams:
    """Validate (k, delta, n, q) and derive the full parameter set.

    Every precondition failure names the violated inequality. When q is
    omitted it defaults to the smallest prime large enough for n distinct
    nonzero evaluation points and a one-byte-per-symbol payload mapping.
    """
    if k < 2:
        raise ValueError(f"k must satisfy k >= 2, got {k}")
    if delta < 1:
        raise ValueError(f"delta must satisfy delta >= 1, got {delta}")
    d_max = (delta + 1) * (k - 1)
    if n < d_max + 1:
        raise ValueError(
            f"n must satisfy n >= (delta+1)(k-1)+1 = {d_max + 1}, got {n}; "
            f"the largest repair uses {d_max} helpers plus the failed node"
        )
    if q is None:
        q = smallest_prime_geq(max(n + 1, BYTE_SAFE_MIN_Q))
        fq = PrimeField(q)
    else:
        try:
            fq = PrimeField(q)
        except ValueError:
            raise ValueError(f"q must be prime, got {q}") from None
        if q < n + 1:
            raise ValueError(
                f"q must satisfy q >= n+1 = {n + 1} for n distinct nonzero "
                f"evaluation points, got {q}"
            )

    if eval_points is None:
        points = tuple(range(1, n + 1))
    else:
        points = tuple(int(e) % q for e in eval_points)
        if len(points) != n:
            raise ValueError(f"need exactly n = {n} evaluation points, got {len(points)}")
        if any(e == 0 for e in points):
            raise ValueError("evaluation points must be nonzero")
        if len(set(points)) != n:
            raise ValueError("evaluation points must be pairwise distinct")

    z = lcm_upto(delta)
    alpha = (k - 1) * z
    helper_counts = tuple((i + 1) * (k - 1) for i in range(1, delta + 1))
    beta = {d: alpha // (d - k + 1) for d in helper_counts}
    for d in helper_counts:
        if beta[d] * (d - k + 1) != alpha:
            raise AssertionError(f"alpha = {alpha} not divisible at d = {d}")
    gamma = {d: d * beta[d] for d in helper_counts}
    return CodeParams(
        n=n,
        k=k,
        delta=delta,
        q=q,
        z_delta=z,
        alpha=alpha,
        file_symbols=k * alpha,
        helper_counts=helper_counts,
        per_node_bandwidth=beta,
        total_bandwidth=gamma,
        eval_points=points,
        field=fq,
    )
