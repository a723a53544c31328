"""Reference miners used to check the pattern-growth miner.

``brute_force_mine`` enumerates every instance of every pattern in every
q-sequence and takes the definitional max/sum; it shares no code with the
chain machinery. ``pfus_like_mine`` is a level-wise generate-and-test miner
pruned only by the HFSUUB-style bound (sum of MFSU over the sequences that
contain a candidate). It is a stand-in for that family of algorithms, not a
port of any particular one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import fuzzy
from .miner import TOL, MiningResult, MiningStats, gc_paused, sorted_patterns
from .model import (
    ConfigError,
    FItem,
    FSequence,
    MembershipFunction,
    NodeBudgetExceeded,
    QDatabase,
    pattern_sort_key,
)

DEFAULT_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class OracleConfig:
    xi: float
    max_length: int = 10**9

    def __post_init__(self):
        if self.max_length < 1:
            raise ConfigError(f"max_length must be >= 1, got {self.max_length}")
        if not (0.0 < self.xi <= 1.0):
            raise ConfigError(f"xi must lie in (0, 1], got {self.xi}")


def all_pattern_utilities(
    db: QDatabase,
    mf: MembershipFunction,
    max_length: int = 10**9,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> dict[FSequence, float]:
    """fu of every f-sequence (up to ``max_length`` f-items) contained in ``db``.

    Every pattern missing from the result has fu = 0.
    """
    table = db.utility_table
    total: dict[FSequence, float] = {}
    nodes = 0
    for qs in db.sequences:
        flat = []  # (itemset index, item, [(region, fu)])
        for j, x in enumerate(qs.itemsets, start=1):
            for qi in x.items:
                u = qi.quantity * table[qi.item]
                degs = fuzzy.fuzzify(u, mf)
                opts = [(r, u * d) for r, d in enumerate(degs) if d > 0.0]
                flat.append((j, qi.item, opts))
        best: dict[FSequence, float] = {}
        # every instance: a chain of chosen positions, each with a region
        stack = [(-1, 0, (), 0.0, 0)]
        while stack:
            last, j_last, pat, fu, length = stack.pop()
            if length >= max_length:
                continue
            for q in range(last + 1, len(flat)):
                j, item, opts = flat[q]
                for r, v in opts:
                    fi = FItem(item, r)
                    if j == j_last:
                        new = pat[:-1] + (pat[-1] + (fi,),)
                    else:
                        new = pat + ((fi,),)
                    val = fu + v
                    nodes += 1
                    if val > best.get(new, -1.0):
                        best[new] = val
                    stack.append((q, j, new, val, length + 1))
            if nodes > node_budget:
                raise NodeBudgetExceeded(f"brute force visited more than {node_budget} instances")
        for pat, v in best.items():
            total[pat] = total.get(pat, 0.0) + v
    return total


def brute_force_mine(
    db: QDatabase,
    mf: MembershipFunction,
    xi: float,
    max_length: int = 10**9,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MiningResult:
    return brute_force_sweep(db, mf, [xi], max_length, node_budget)[xi]


def brute_force_sweep(
    db: QDatabase,
    mf: MembershipFunction,
    xis,
    max_length: int = 10**9,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> dict[float, MiningResult]:
    """``brute_force_mine`` at several thresholds from a single enumeration."""
    xis = list(xis)
    for xi in xis:
        OracleConfig(xi, max_length)
    if not xis:
        return {}
    t0 = time.perf_counter()
    with gc_paused():
        fus = all_pattern_utilities(db, mf, max_length, node_budget)
        lowest = db.total_utility * min(xis) - TOL
        ordered = sorted_patterns((fs, v) for fs, v in fus.items() if v >= lowest)
    elapsed = (time.perf_counter() - t0) * 1000.0
    out = {}
    for xi in xis:
        gate = db.total_utility * xi - TOL
        out[xi] = MiningResult(
            [(fs, v) for fs, v in ordered if v >= gate],
            MiningStats(candidates=len(fus), runtime_ms=elapsed),
            mf.labels,
        )
    return out


def pfus_like_mine(
    db: QDatabase,
    mf: MembershipFunction,
    xi: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MiningResult:
    """Level-wise generate-and-test.

    Level k+1 candidates are the level-k survivors joined with every level-1
    survivor, as an S-extension and, when the item order allows, as an
    I-extension. Every join counts as a candidate. Support counting then scans
    each sequence holding a survivor once and updates all candidates found
    there; a candidate never met has fu 0. A candidate survives to the next
    level when the sum of MFSU over the sequences containing it reaches
    u(D) * xi. ``node_budget`` caps the number of candidates met in scans.
    """
    OracleConfig(xi)
    with gc_paused():
        return _pfus_like(db, mf, xi, node_budget)


def _pfus_like(db, mf, xi, node_budget):
    t0 = time.perf_counter()
    table = db.utility_table
    gate = db.total_utility * xi - TOL
    stats = MiningStats()

    # per sequence: itemsets as lists of (item, [(region, fu)]) with positive degrees only
    rows: dict[int, list[list[tuple[str, list[tuple[int, float]]]]]] = {}
    mfsu: dict[int, float] = {}
    for qs in db.sequences:
        sets = []
        for x in qs.itemsets:
            cur = []
            for qi in x.items:
                u = qi.quantity * table[qi.item]
                cur.append((qi.item, [(r, u * d) for r, d in enumerate(fuzzy.fuzzify(u, mf)) if d > 0.0]))
            sets.append(cur)
        rows[qs.sid] = sets
        mfsu[qs.sid] = fuzzy.mfsu(qs, table, mf)

    # a pattern's table: sid -> {itemset index: best fu of an instance ending there}
    level1: dict[FItem, dict[int, dict[int, float]]] = {}
    for sid, sets in rows.items():
        for j, x in enumerate(sets):
            for item, opts in x:
                for r, v in opts:
                    per = level1.setdefault(FItem(item, r), {}).setdefault(sid, {})
                    per[j] = v

    found: list[tuple[FSequence, float]] = []
    level = []
    for fi in sorted(level1):
        stats.candidates += 1
        tab = level1[fi]
        fu = sum(max(ends.values()) for ends in tab.values())
        fs: FSequence = ((fi,),)
        if fu >= gate:
            found.append((fs, fu))
        if sum(mfsu[s] for s in tab) >= gate:
            level.append((fs, tab))
    singles = {fs[0][0] for fs, _ in level}
    n_singles = len(singles)
    single_items = sorted(fi.item for fi in singles)

    met = 0
    while level:
        nxt = []
        for parent, tab in level:
            last = parent[-1][-1].item
            # joins: every single as an S-extension, the larger-item ones as I-extensions too
            stats.candidates += n_singles + sum(1 for it in single_items if it > last)
            i_tabs: dict[FItem, dict[int, dict[int, float]]] = {}
            s_tabs: dict[FItem, dict[int, dict[int, float]]] = {}
            for sid, ends in tab.items():
                sets = rows[sid]
                for j, v in ends.items():
                    for item, opts in sets[j]:
                        if item <= last:
                            continue
                        for r, w in opts:
                            fi = FItem(item, r)
                            if fi in singles:
                                per = i_tabs.setdefault(fi, {}).setdefault(sid, {})
                                if v + w > per.get(j, -1.0):
                                    per[j] = v + w
                best = float("-inf")
                for j in range(len(sets)):
                    # best prefix value over instances ending strictly before itemset j
                    if best > float("-inf"):
                        for item, opts in sets[j]:
                            for r, w in opts:
                                fi = FItem(item, r)
                                if fi in singles:
                                    s_tabs.setdefault(fi, {}).setdefault(sid, {})[j] = best + w
                    v = ends.get(j)
                    if v is not None and v > best:
                        best = v
            for kind_tabs, make in ((i_tabs, lambda fi: parent[:-1] + (parent[-1] + (fi,),)), (s_tabs, lambda fi: parent + ((fi,),))):
                for fi, ctab in kind_tabs.items():
                    met += 1
                    if met > node_budget:
                        raise NodeBudgetExceeded(f"more than {node_budget} candidates met during support counting")
                    cand = make(fi)
                    fu = sum(max(ends.values()) for ends in ctab.values())
                    if fu >= gate:
                        found.append((cand, fu))
                    if sum(mfsu[s] for s in ctab) >= gate:
                        nxt.append((cand, ctab))
        level = nxt
    stats.runtime_ms = (time.perf_counter() - t0) * 1000.0
    return MiningResult(sorted_patterns(found), stats, mf.labels)


@dataclass
class ComparisonReport:
    only_a: list[FSequence] = field(default_factory=list)
    only_b: list[FSequence] = field(default_factory=list)
    max_delta: float = 0.0
    common: int = 0
    tol: float = TOL

    @property
    def symmetric_difference(self) -> list[FSequence]:
        return self.only_a + self.only_b

    @property
    def match(self) -> bool:
        return not self.only_a and not self.only_b and self.max_delta <= self.tol

    def __str__(self):
        head = "MATCH" if self.match else "MISMATCH"
        return (
            f"{head} common={self.common} only_a={len(self.only_a)} "
            f"only_b={len(self.only_b)} max_delta={self.max_delta:.3e}"
        )


def compare_results(a: MiningResult, b: MiningResult, tol: float = TOL) -> ComparisonReport:
    da, dbb = a.as_dict(), b.as_dict()
    common = da.keys() & dbb.keys()
    delta = max((abs(da[k] - dbb[k]) for k in common), default=0.0)
    return ComparisonReport(
        only_a=sorted(da.keys() - dbb.keys(), key=pattern_sort_key),
        only_b=sorted(dbb.keys() - da.keys(), key=pattern_sort_key),
        max_delta=delta,
        common=len(common),
        tol=tol,
    )

