"""
Fuzzy utility on a four-sequence shop log
=========================================

The small shop log shipped with the package, followed from raw purchases to
the patterns that clear a threshold.
"""

# the log, its price table and the three-region membership curve
import numpy as np

from fumine import fsequence, mine, reference_membership, running_example
from fumine import fuzzy
from fumine.model import format_pattern

db = running_example()
mf = reference_membership()
prices = db.utility_table
print("total utility u(D) =", db.total_utility)

# a q-item's utility is quantity times price; the curve splits it into
# Low / Middle / High degrees
first = db.sequences[0]
for j, itemset in enumerate(first.itemsets, start=1):
    for qi in itemset.items:
        u = qi.utility(prices)
        print(f"itemset {j}: {qi.item} x{qi.quantity} -> u={u:g}, degrees {mf.fuzzify(u)}")

# the membership curve itself, sampled on a grid
grid = np.linspace(0, 12, 7)
print(np.array([mf.fuzzify(u) for u in grid]).round(2))

# b:Low then e:Middle can be embedded at itemsets (1, 2) and (1, 3);
# a sequence credits the better of the two
pattern = fsequence([("b", "Low")], [("e", "Middle")], mf=mf)
for pos in sorted(fuzzy.find_instances(pattern, first, prices, mf)):
    print(pos, fuzzy.fu_at_position(pattern, pos, first, prices, mf))
print("in the sequence:", fuzzy.fu_in_sequence(pattern, first, prices, mf))

# the database value sums the per-sequence maxima
pattern = fsequence([("a", "Middle")], [("e", "Middle")], mf=mf)
print(format_pattern(pattern, mf), fuzzy.fu_in_database(pattern, db, mf))

# mining at xi = 0.3 keeps patterns with fu >= 51.3; at 0.1 there are hundreds
result = mine(db, mf, 0.3)
print(len(result.patterns), "patterns, the five shortest:")
for fs, fu in result.patterns[:5]:
    print(f"{format_pattern(fs, mf):40s} {fu:6.2f}")
print(result.stats)
