"""Pattern-growth mining of high-fuzzy-utility sequential patterns.

The search walks the fuzzy extension tree depth first. Three upper bounds
gate it:

* HFSUUB (sum of MFSU over sequences containing a 1-f-sequence), checked
  once per 1-f-sequence (PPO);
* SDFU of a node's chain, deciding whether its children are explored (EUD);
* EIFU of a candidate extension, deciding whether its chain is built at all
  (PES). EIFU values are accumulated while scanning the parent chain for
  extension f-items.
"""

from __future__ import annotations

import gc
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

from .model import (
    ConfigError,
    FItem,
    FSequence,
    MembershipFunction,
    NodeBudgetExceeded,
    QDatabase,
    pattern_length,
    pattern_sort_key,
)
from .structures import (
    I_EXT,
    S_EXT,
    FMatrixSet,
    FuzzyUtilityChain,
    build_fmatrix_set,
    build_initial_chains,
    project_i,
    project_s,
)

TOL = 1e-9


@dataclass(frozen=True)
class MiningConfig:
    xi: float
    enable_ppo: bool = True
    enable_eud: bool = True
    enable_pes: bool = True
    max_length: int | None = None
    parallel_width: int = 0
    node_budget: int | None = None

    def __post_init__(self):
        if not (0.0 < self.xi <= 1.0):
            raise ConfigError(f"xi must lie in (0, 1], got {self.xi}")
        if self.max_length is not None and self.max_length < 1:
            raise ConfigError(f"max_length must be positive, got {self.max_length}")
        if self.parallel_width < 0:
            raise ConfigError(f"parallel_width must be >= 0, got {self.parallel_width}")
        if self.node_budget is not None and self.node_budget < 1:
            raise ConfigError(f"node_budget must be positive, got {self.node_budget}")


@dataclass
class MiningStats:
    candidates: int = 0
    chains_built: int = 0
    pruned_ppo: int = 0
    pruned_eud: int = 0
    pruned_pes: int = 0
    peak_live_elements: int = 0
    runtime_ms: float = 0.0

    def merge(self, other: "MiningStats") -> None:
        self.candidates += other.candidates
        self.chains_built += other.chains_built
        self.pruned_ppo += other.pruned_ppo
        self.pruned_eud += other.pruned_eud
        self.pruned_pes += other.pruned_pes
        self.peak_live_elements = max(self.peak_live_elements, other.peak_live_elements)


@dataclass
class MiningResult:
    patterns: list[tuple[FSequence, float]]
    stats: MiningStats = field(default_factory=MiningStats)
    labels: tuple[str, ...] = ()

    def __len__(self):
        return len(self.patterns)

    def as_dict(self) -> dict[FSequence, float]:
        return dict(self.patterns)

    def pattern_set(self) -> set[FSequence]:
        return {fs for fs, _ in self.patterns}


@dataclass
class MiningTrace:
    """Optional recorder of every bound the search computes (sequential mode only)."""

    hfsuub: dict[FItem, float] = field(default_factory=dict)
    nodes: dict[FSequence, tuple[float, float]] = field(default_factory=dict)  # fu, sdfu
    extensions: dict[FSequence, float] = field(default_factory=dict)  # eifu


@contextmanager
def gc_paused():
    """Suspend the cyclic collector while millions of small acyclic tuples are built.

    Generational passes over the growing result list otherwise cost about as
    much as the search itself.
    """
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def sorted_patterns(pairs) -> list[tuple[FSequence, float]]:
    return sorted(pairs, key=lambda p: pattern_sort_key(p[0]))


# ---------------------------------------------------------------------------
# bounds


def hfsuub_all(fms: FMatrixSet) -> dict[FItem, float]:
    """HFSUUB of every 1-f-sequence that occurs somewhere."""
    out: dict[FItem, float] = {}
    for sid, fm in fms.matrices.items():
        seen = set()
        for fis in fm.fitems:
            seen.update(fis)
        m = fm.mfsu
        for fi in seen:
            out[fi] = out.get(fi, 0.0) + m
    return out


def hfsuub(fs: FSequence, db: QDatabase, fms: FMatrixSet | None = None, mf: MembershipFunction | None = None) -> float:
    if pattern_length(fs) != 1:
        raise ValueError("HFSUUB is defined here for 1-f-sequences only")
    if fms is None:
        fms = build_fmatrix_set(db, mf)
    item, r = fs[0][0]
    total = 0.0
    for fm in fms.matrices.values():
        for pos in fm.rows.get(item, ()):
            if fm.degrees[pos][r] > 0.0:
                total += fm.mfsu
                break
    return total


def sdfu(chain: FuzzyUtilityChain) -> float:
    return chain.sdfu


def scan_extensions(chain: FuzzyUtilityChain, fms: FMatrixSet) -> tuple[dict[FItem, float], dict[FItem, float]]:
    """One pass over a prefix chain collecting I- and S-extension f-items with their EIFU."""
    i_eifu: dict[FItem, float] = {}
    s_eifu: dict[FItem, float] = {}
    matrices = fms.matrices
    for sid, els, sd in zip(chain.sids, chain.lists, chain.sdfus):
        fm = matrices[sid]
        fitems, ends = fm.fitems, fm.ends
        iset = set()
        for pos, _, _ in els:
            for p in range(pos + 1, ends[pos]):
                iset.update(fitems[p])
        sset = set()
        first = ends[els[0][0]]
        for p in range(first, len(fitems)):
            sset.update(fitems[p])
        for fi in iset:
            i_eifu[fi] = i_eifu.get(fi, 0.0) + sd
        for fi in sset:
            s_eifu[fi] = s_eifu.get(fi, 0.0) + sd
    return i_eifu, s_eifu


def enumerate_extensions(prefix: FSequence, chain: FuzzyUtilityChain, fms: FMatrixSet) -> tuple[list[FItem], list[FItem]]:
    i_eifu, s_eifu = scan_extensions(chain, fms)
    return sorted(i_eifu), sorted(s_eifu)


def eifu_of_extensions(prefix_chain: FuzzyUtilityChain, candidates, fms: FMatrixSet) -> dict[tuple[FItem, str], float]:
    """EIFU for ``(f-item, kind)`` candidates; kind is ``"I"`` or ``"S"``. Absent ones get 0."""
    i_eifu, s_eifu = scan_extensions(prefix_chain, fms)
    out = {}
    for fi, kind in candidates:
        src = i_eifu if kind == I_EXT else s_eifu
        out[(fi, kind)] = src.get(fi, 0.0)
    return out


# ---------------------------------------------------------------------------
# search


class _Search:
    def __init__(self, fms: FMatrixSet, cfg: MiningConfig, minutil: float, trace: MiningTrace | None = None):
        self.fms = fms
        self.cfg = cfg
        self.minutil = minutil
        self.gate = minutil - TOL
        self.trace = trace
        self.stats = MiningStats()
        self.found: list[tuple[FSequence, float]] = []
        self.live = 0

    def _count_candidate(self):
        self.stats.candidates += 1
        budget = self.cfg.node_budget
        if budget is not None and self.stats.candidates > budget:
            raise NodeBudgetExceeded(f"more than {budget} candidates evaluated")

    def _hold(self, chain: FuzzyUtilityChain):
        self.live += chain.size
        if self.live > self.stats.peak_live_elements:
            self.stats.peak_live_elements = self.live

    def root(self, fi: FItem, chain: FuzzyUtilityChain):
        """Evaluate one 1-f-sequence that passed PPO and grow its subtree."""
        fs: FSequence = ((fi,),)
        self._count_candidate()
        self._hold(chain)
        if self.trace is not None:
            self.trace.nodes[fs] = (chain.fu, chain.sdfu)
        if chain.fu >= self.gate:
            self.found.append((fs, chain.fu))
        if self.cfg.enable_eud and chain.sdfu < self.gate:
            self.stats.pruned_eud += 1
        else:
            self.recurse(fs, chain, 1)
        self.live -= chain.size

    def recurse(self, prefix: FSequence, chain: FuzzyUtilityChain, length: int):
        cfg = self.cfg
        if cfg.max_length is not None and length >= cfg.max_length:
            return
        fms, gate, trace, stats = self.fms, self.gate, self.trace, self.stats
        pes = cfg.enable_pes
        i_eifu, s_eifu = scan_extensions(chain, fms)
        children = []
        last = prefix[-1]
        head = prefix[:-1]
        # dict order comes from a deterministic scan, so no sorting is needed here
        for fi, e in i_eifu.items():
            ext = head + (last + (fi,),)
            if trace is not None:
                trace.extensions[ext] = e
            if pes and e < gate:
                stats.pruned_pes += 1
                continue
            children.append((ext, project_i(chain, fi, fms)))
        for fi, e in s_eifu.items():
            ext = prefix + ((fi,),)
            if trace is not None:
                trace.extensions[ext] = e
            if pes and e < gate:
                stats.pruned_pes += 1
                continue
            children.append((ext, project_s(chain, fi, fms)))
        stats.chains_built += len(children)
        self.live += sum(c.size for _, c in children)
        if self.live > stats.peak_live_elements:
            stats.peak_live_elements = self.live
        budget = cfg.node_budget
        eud = cfg.enable_eud
        found = self.found
        for ext, child in children:
            stats.candidates += 1
            if budget is not None and stats.candidates > budget:
                raise NodeBudgetExceeded(f"more than {budget} candidates evaluated")
            if trace is not None:
                trace.nodes[ext] = (child.fu, child.sdfu)
            if child.fu >= gate:
                found.append((ext, child.fu))
            if eud and child.sdfu < gate:
                stats.pruned_eud += 1
            else:
                self.recurse(ext, child, length + 1)
            self.live -= child.size


def _prepare(db: QDatabase, mf: MembershipFunction, cfg: MiningConfig, fms: FMatrixSet | None):
    if fms is None:
        fms = build_fmatrix_set(db, mf)
    minutil = db.total_utility * cfg.xi
    bounds = hfsuub_all(fms)
    gate = minutil - TOL
    stats = MiningStats()
    if cfg.enable_ppo:
        keep = {fi for fi, v in bounds.items() if v >= gate}
        stats.pruned_ppo = len(bounds) - len(keep)
    else:
        keep = set(bounds)
    roots = build_initial_chains(db, fms, mf, keep=keep)
    stats.chains_built = len(roots)
    return fms, minutil, bounds, roots, stats


# state inherited by forked workers
_WORKER_STATE: dict = {}


def _mine_root(fi: FItem):
    st = _WORKER_STATE
    search = _Search(st["fms"], st["cfg"], st["minutil"])
    search.root(fi, st["roots"][fi])
    return search.found, search.stats


def mine(
    db: QDatabase,
    mf: MembershipFunction,
    cfg: MiningConfig,
    *,
    fms: FMatrixSet | None = None,
    trace: MiningTrace | None = None,
) -> MiningResult:
    """All f-sequences with fuzzy utility >= u(D) * xi, in deterministic order."""
    if isinstance(cfg, (int, float)):
        cfg = MiningConfig(xi=float(cfg))
    with gc_paused():
        return _mine(db, mf, cfg, fms, trace)


def _mine(db, mf, cfg, fms, trace) -> MiningResult:
    t0 = time.perf_counter()
    fms, minutil, bounds, roots, stats = _prepare(db, mf, cfg, fms)
    if trace is not None:
        trace.hfsuub.update(bounds)
    found: list[tuple[FSequence, float]] = []

    if cfg.parallel_width > 0 and trace is None and len(roots) > 1:
        _WORKER_STATE.update(fms=fms, cfg=cfg, minutil=minutil, roots=roots)
        try:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=cfg.parallel_width, mp_context=ctx) as pool:
                for part, sub in pool.map(_mine_root, list(roots), chunksize=1):
                    found.extend(part)
                    stats.merge(sub)
        finally:
            _WORKER_STATE.clear()
        root_elements = sum(c.size for c in roots.values())
        stats.peak_live_elements += root_elements
    else:
        search = _Search(fms, cfg, minutil, trace)
        search.stats = stats
        search.live = sum(c.size for c in roots.values())
        stats.peak_live_elements = search.live
        for fi, chain in roots.items():
            search.live -= chain.size
            search.root(fi, chain)
            search.live += chain.size
        found = search.found

    stats.runtime_ms = (time.perf_counter() - t0) * 1000.0
    if cfg.node_budget is not None and stats.candidates > cfg.node_budget:
        raise NodeBudgetExceeded(f"more than {cfg.node_budget} candidates evaluated")
    return MiningResult(sorted_patterns(found), stats, mf.labels)


def recursive_mining(prefix: FSequence, chain: FuzzyUtilityChain, cfg: MiningConfig, acc: MiningResult, fms: FMatrixSet, db: QDatabase, mf: MembershipFunction | None = None) -> None:
    """Explore every descendant of ``prefix`` and add the qualifying ones to ``acc``.

    The caller is responsible for the EUD check on ``prefix`` itself.
    """
    search = _Search(fms, cfg, db.total_utility * cfg.xi)
    search.recurse(prefix, chain, pattern_length(prefix))
    acc.patterns = sorted_patterns(acc.patterns + search.found)
    acc.stats.merge(search.stats)
