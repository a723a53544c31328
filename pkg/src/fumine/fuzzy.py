"""Fuzzy utility of f-items, f-itemsets and f-sequences evaluated straight from q-sequences.

These functions work on the raw :class:`~fumine.model.QSequence` and are the
reference semantics the compressed structures in :mod:`fumine.structures`
have to agree with. Itemset indices are 1-based, item indices 0-based.
"""

from __future__ import annotations

from typing import NamedTuple

from .model import (
    FItem,
    FItemset,
    FSequence,
    FumineError,
    MembershipFunction,
    QDatabase,
    QSequence,
    UtilityTable,
)

InstancePosition = tuple[int, ...]


class ExtensionAnchor(NamedTuple):
    itemset_index: int
    item_index: int


class AnchorError(FumineError, ValueError):
    pass


class NotContainedError(FumineError, ValueError):
    pass


def fuzzify(u: float, mf: MembershipFunction) -> tuple[float, ...]:
    return mf.fuzzify(u)


def _qitem_at(qs: QSequence, anchor) -> tuple[int, int]:
    j, k = anchor
    if not 1 <= j <= len(qs.itemsets) or not 0 <= k < len(qs.itemsets[j - 1].items):
        raise AnchorError(f"anchor {tuple(anchor)} outside q-sequence {qs.sid}")
    return j, k


def fu_fitem(fi: FItem, anchor, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    j, k = _qitem_at(qs, anchor)
    qi = qs.itemsets[j - 1].items[k]
    if qi.item != fi.item:
        raise AnchorError(f"anchor {tuple(anchor)} holds {qi.item!r}, not {fi.item!r}")
    u = qi.quantity * table[qi.item]
    return u * mf.fuzzify(u)[fi.region]


def _match_itemset(fx: FItemset, j: int, qs: QSequence, table, mf):
    """Fuzzy utility of ``fx`` in itemset ``j``, or None when not contained."""
    total = 0.0
    items = qs.itemsets[j - 1].items
    k = 0
    for fi in fx:
        while k < len(items) and items[k].item < fi.item:
            k += 1
        if k == len(items) or items[k].item != fi.item:
            return None
        u = items[k].quantity * table[fi.item]
        d = mf.fuzzify(u)[fi.region]
        if d <= 0.0:
            return None
        total += u * d
        k += 1
    return total


def contains_itemset(fx: FItemset, j: int, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> bool:
    if not fx:
        raise ValueError("f-itemset must not be empty")
    if not 1 <= j <= len(qs.itemsets):
        raise IndexError(f"itemset index {j} outside q-sequence {qs.sid}")
    return _match_itemset(fx, j, qs, table, mf) is not None


def find_instances(fs: FSequence, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> set[InstancePosition]:
    n = len(qs.itemsets)
    hits = [[j for j in range(1, n + 1) if _match_itemset(fx, j, qs, table, mf) is not None] for fx in fs]
    out = set()

    def walk(v, after, acc):
        if v == len(fs):
            out.add(tuple(acc))
            return
        for j in hits[v]:
            if j > after:
                acc.append(j)
                walk(v + 1, j, acc)
                acc.pop()

    walk(0, 0, [])
    return out


def fu_fitemset_at(fx: FItemset, j: int, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    got = _match_itemset(fx, j, qs, table, mf)
    if got is None:
        raise NotContainedError(f"itemset {j} of q-sequence {qs.sid} does not contain {fx}")
    return got


def fu_at_position(fs: FSequence, p: InstancePosition, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    if len(p) != len(fs) or any(b <= a for a, b in zip(p, p[1:])):
        raise NotContainedError(f"{p} is not a valid position for a {len(fs)}-itemset pattern")
    total = 0.0
    for fx, j in zip(fs, p):
        if not 1 <= j <= len(qs.itemsets):
            raise NotContainedError(f"{p} outside q-sequence {qs.sid}")
        got = _match_itemset(fx, j, qs, table, mf)
        if got is None:
            raise NotContainedError(f"no instance of the pattern at {p} in q-sequence {qs.sid}")
        total += got
    return total


def fu_in_sequence(fs: FSequence, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    """Max fuzzy utility over all instances, by dynamic programming over itemsets."""
    n = len(qs.itemsets)
    neg = float("-inf")
    # best[j]: max fu of the first v f-itemsets matched with the last one at itemset <= j
    best = [0.0] * (n + 1)
    for fx in fs:
        cur = [neg] * (n + 1)
        run = neg
        for j in range(1, n + 1):
            if best[j - 1] > neg:
                got = _match_itemset(fx, j, qs, table, mf)
                if got is not None:
                    run = max(run, best[j - 1] + got)
            cur[j] = run
        best = cur
        best[0] = neg
    return best[n] if best[n] > neg else 0.0


def fu_in_database(fs: FSequence, db: QDatabase, mf: MembershipFunction) -> float:
    table = db.utility_table
    return sum(fu_in_sequence(fs, qs, table, mf) for qs in db.sequences)


def mfui(item: str, j: int, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    if not 1 <= j <= len(qs.itemsets):
        raise AnchorError(f"itemset index {j} outside q-sequence {qs.sid}")
    k = qs.itemsets[j - 1].index_of(item)
    if k is None:
        raise AnchorError(f"{item!r} does not occur in itemset {j} of q-sequence {qs.sid}")
    u = qs.itemsets[j - 1].items[k].quantity * table[item]
    return u * max(mf.fuzzify(u))


def mfsu(qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    total = 0.0
    for x in qs.itemsets:
        for qi in x.items:
            u = qi.quantity * table[qi.item]
            total += u * max(mf.fuzzify(u))
    return total


def mrfu(fs: FSequence, anchor, qs: QSequence, table: UtilityTable, mf: MembershipFunction) -> float:
    """Sum of MFUI over every q-item strictly after ``anchor`` in sequence order."""
    j, k = _qitem_at(qs, anchor)
    last = fs[-1][-1]
    if qs.itemsets[j - 1].items[k].item != last.item:
        raise AnchorError(f"anchor {tuple(anchor)} does not hold the extension item {last.item!r}")
    if not any(p[-1] == j for p in find_instances(fs, qs, table, mf)):
        raise AnchorError(f"no instance of the pattern ends at itemset {j} of q-sequence {qs.sid}")
    total = 0.0
    for jj, x in enumerate(qs.itemsets, start=1):
        if jj < j:
            continue
        for kk, qi in enumerate(x.items):
            if jj == j and kk <= k:
                continue
            u = qi.quantity * table[qi.item]
            total += u * max(mf.fuzzify(u))
    return total
