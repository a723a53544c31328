"""Small bundled databases."""

from __future__ import annotations

import numpy as np

from .model import QDatabase, QItem, QItemset, QSequence, UtilityTable, make_database

EXAMPLE_ROWS = [
    [[("b", 2), ("d", 3)], [("a", 3), ("e", 2)], [("b", 1), ("c", 4), ("e", 3)]],
    [[("a", 3), ("c", 4)], [("a", 4), ("d", 1)], [("a", 4), ("c", 2), ("e", 1)], [("d", 5)]],
    [[("a", 1), ("c", 2)], [("e", 2)], [("a", 2), ("d", 3), ("e", 1)]],
    [[("a", 1)], [("a", 3), ("c", 1)], [("d", 4)], [("f", 1)]],
]

EXAMPLE_UTILITIES = {"a": 2, "b": 1, "c": 3, "d": 4, "e": 2, "f": 5}


def running_example() -> QDatabase:
    """The four-sequence running example with its unit-profit table."""
    return make_database(EXAMPLE_ROWS, EXAMPLE_UTILITIES)


def random_database(
    rng: np.random.Generator | int,
    max_sequences: int = 30,
    max_items: int = 8,
    max_length: int = 10,
    max_quantity: int = 5,
    max_price: int = 5,
) -> QDatabase:
    """Small random database for differential testing.

    Sizes are drawn uniformly below the given caps; ``max_length`` caps the
    number of q-items per sequence.
    """
    rng = np.random.default_rng(rng)
    n_items = int(rng.integers(1, max_items + 1))
    names = [chr(ord("a") + k) for k in range(n_items)]
    table = UtilityTable({n: int(rng.integers(1, max_price + 1)) for n in names})
    seqs = []
    for sid in range(1, int(rng.integers(1, max_sequences + 1)) + 1):
        length = int(rng.integers(1, max_length + 1))
        itemsets = []
        left = length
        while left > 0:
            size = int(rng.integers(1, min(left, n_items) + 1))
            chosen = sorted(rng.choice(n_items, size=size, replace=False))
            itemsets.append(QItemset(tuple(QItem(names[c], int(rng.integers(1, max_quantity + 1))) for c in chosen)))
            left -= size
        seqs.append(QSequence(sid, tuple(itemsets)))
    return QDatabase(tuple(seqs), table)
