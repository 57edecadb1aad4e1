"""Walk through the derived quantities for a few code shapes.

Every other demo builds on these numbers, so this one just prints them:
how much each node stores, which helper counts repair supports, and what
each choice of helper count costs in total traffic.
"""

from pmba.params import comparison_subpacketization, derive_params


def show(k, delta, n, q=None):
    params = derive_params(k, delta, n, q=q)
    print(params.describe())
    print()
    print("repair cost by helper count:")
    for d in params.helper_counts:
        beta = params.per_node_bandwidth[d]
        total = params.total_bandwidth[d]
        print(f"  d = {d}: {beta} symbols from each helper, {total} total")
    flat = comparison_subpacketization(params.n, params.delta)
    print()
    print(f"a flat construction would need {flat} sub-symbols per node;")
    print(f"this one needs {params.alpha}, a {flat // params.alpha}x reduction")
    print("-" * 60)


if __name__ == "__main__":
    # The smallest interesting shape: 7 nodes, any 3 rebuild the file,
    # repair works with 4 or with 6 helpers.
    show(3, 2, 7, q=23)

    # A wider code with three supported helper counts.
    show(4, 3, 13, q=17)

    # Same small shape, but with the default byte-safe modulus.
    show(3, 2, 7)
