"""Deterministic table pairs shared by several test modules."""

import numpy as np

from joinguard.tabular import table_from_records


def moderate_and_unique_pair(seed=0):
    """A: 1025 rows with exactly 302 distinct full rows.  B: every row distinct.

    Both carry ``age`` and ``gender``; B also has a unique ``id``.
    """
    rng = np.random.default_rng(seed)
    base = set()
    while len(base) < 302:
        base.add((str(int(rng.integers(29, 78))), "MF"[int(rng.integers(0, 2))], f"c{int(rng.integers(0, 4))}"))
    base = sorted(base)
    # every base row appears at least once; the remaining 723 rows repeat random base rows
    extra = rng.integers(0, len(base), 1025 - len(base))
    rows_a = base + [base[i] for i in extra]
    order = rng.permutation(len(rows_a))
    a = table_from_records(["age", "gender", "cp"], [rows_a[i] for i in order], "A")

    rows_b = [
        (str(int(rng.integers(20, 83))), "MF"[int(rng.integers(0, 2))], f"{i:04d}", f"s{int(rng.integers(0, 3))}")
        for i in range(800)
    ]
    b = table_from_records(["age", "gender", "id", "smoking"], rows_b, "B")
    return a, b
