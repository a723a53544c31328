"""
What each pruning gate buys
===========================

Mines a batch of random databases under every on/off combination of the
three pruning gates and tabulates how many candidates each setting has to
evaluate. The pattern sets never change; only the work does.
"""

import itertools

import numpy as np

from fumine import MiningConfig, mine, pfus_like_mine, random_database, reference_membership
from fumine.structures import build_fmatrix_set

mf = reference_membership()
dbs = [random_database(seed) for seed in range(20)]
fmss = [build_fmatrix_set(d, mf) for d in dbs]
xi = 0.05

# rows: databases, columns: the eight (ppo, eud, pes) settings
settings = list(itertools.product([True, False], repeat=3))
counts = np.zeros((len(dbs), len(settings)), dtype=np.int64)
for r, (db, fms) in enumerate(zip(dbs, fmss)):
    reference = None
    for c, flags in enumerate(settings):
        res = mine(db, mf, MiningConfig(xi, *flags), fms=fms)
        counts[r, c] = res.stats.candidates
        reference = reference or res.pattern_set()
        assert res.pattern_set() == reference

for flags, col in zip(settings, counts.T):
    name = " ".join(f"{g}={'on ' if f else 'off'}" for g, f in zip(("ppo", "eud", "pes"), flags))
    print(f"{name}  total {col.sum():8d}  median {np.median(col):7.0f}")

# the level-wise baseline joins blindly and pays for it
level_wise = np.array([pfus_like_mine(db, mf, xi).stats.candidates for db in dbs])
print("level-wise total", level_wise.sum())
print("ratio to all gates on:", round(level_wise.sum() / counts[:, 0].sum(), 1))
