"""
Generate, write, read back, mine
================================

A synthetic database goes through the same files the command line uses:
generator output, parser, miner and result writer.
"""

import tempfile
from pathlib import Path

import numpy as np

from fumine import MiningConfig, io, mine, reference_membership

params = io.GeneratorParams(
    n_sequences=500,
    n_items=60,
    max_seq_itemsets=6,
    max_itemset_size=4,
    max_quantity=5,
    utility_range=(1.0, 10.0),
    seed=7,
    skew=0.8,
)

out = Path(tempfile.mkdtemp())
io.generate_synthetic(params, out / "syn.db", out / "syn.ut")
mf = reference_membership()
io.write_membership(mf, out / "mfa.mf")

# reading back goes through the validating parser
db = io.parse_database(out / "syn.db", out / "syn.ut")
print(io.describe(db))

# how the popularity skew shows up: item frequency falls off quickly
counts = {}
for s in db.sequences:
    for x in s.itemsets:
        for qi in x.items:
            counts[qi.item] = counts.get(qi.item, 0) + 1
freq = np.sort(np.fromiter(counts.values(), dtype=int))[::-1]
print("top five item counts:", freq[:5], "median:", int(np.median(freq)))

cfg = MiningConfig(0.01)
result = mine(db, io.parse_membership(out / "mfa.mf"), cfg)
io.write_results(result, out / "syn.out")
io.write_stats(result, db, out / "syn.stats", cfg)
print((out / "syn.out").read_text().splitlines()[-1])
print((out / "syn.stats").read_text())
