"""F-matrix set and fuzzy utility chains.

Positions inside one q-sequence are addressed by their *flat index*: the
q-items of all itemsets laid end to end, in sequence order. Because items in
an itemset are sorted, "strictly after in flat order" is exactly the set of
q-items that can follow a pattern's last item through an I- or S-extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .fuzzy import AnchorError, ExtensionAnchor
from .model import (
    FItem,
    FSequence,
    MembershipFunction,
    QDatabase,
    UtilityTable,
    ValidationError,
)

I_EXT = "I"
S_EXT = "S"


class FMatrixCell(NamedTuple):
    utility: float
    degrees: tuple[float, ...]
    remaining: float


class FMatrix:
    """Sparse f-matrix of one q-sequence, stored as parallel per-position lists.

    ``rows[item]`` lists the flat positions of ``item`` in ascending order; an
    item missing from ``rows`` has a null row.
    """

    __slots__ = (
        "sid", "n_itemsets", "items", "itemset_of", "starts", "ends",
        "utility", "degrees", "mfui", "remaining", "fitems", "rows", "mfsu",
    )

    def __len__(self):
        return len(self.items)

    def position(self, anchor) -> int:
        j, k = anchor
        if not 1 <= j <= self.n_itemsets:
            raise AnchorError(f"itemset {j} outside q-sequence {self.sid}")
        pos = self.starts[j - 1] + k
        if not 0 <= k or pos >= self.starts[j]:
            raise AnchorError(f"item index {k} outside itemset {j} of q-sequence {self.sid}")
        return pos

    def anchor(self, pos: int) -> ExtensionAnchor:
        j = self.itemset_of[pos]
        return ExtensionAnchor(j, pos - self.starts[j - 1])

    def cell(self, item: str, itemset_index: int) -> FMatrixCell | None:
        """None for an empty cell (item absent from that itemset)."""
        for pos in self.rows.get(item, ()):
            if self.itemset_of[pos] == itemset_index:
                return FMatrixCell(self.utility[pos], self.degrees[pos], self.remaining[pos])
        return None

    def row(self, item: str) -> dict[int, FMatrixCell] | None:
        positions = self.rows.get(item)
        if positions is None:
            return None
        return {
            self.itemset_of[p]: FMatrixCell(self.utility[p], self.degrees[p], self.remaining[p])
            for p in positions
        }


@dataclass(frozen=True)
class FMatrixSet:
    matrices: dict[int, FMatrix]
    mfsu: dict[int, float]
    table: UtilityTable
    mf: MembershipFunction

    def __getitem__(self, sid) -> FMatrix:
        return self.matrices[sid]

    def __len__(self):
        return len(self.matrices)


def build_fmatrix_set(db: QDatabase, mf: MembershipFunction) -> FMatrixSet:
    table = db.utility_table
    n_regions = len(mf.regions)
    # (item, quantity) -> (utility, degrees, mfui, positive f-items); shared between cells
    memo: dict = {}
    matrices, mfsus = {}, {}
    for qs in db.sequences:
        fm = FMatrix()
        fm.sid = qs.sid
        fm.n_itemsets = len(qs.itemsets)
        items, itemset_of, ends, starts = [], [], [], [0]
        util, degs, mf_u, fitems = [], [], [], []
        rows: dict[str, list[int]] = {}
        for j, x in enumerate(qs.itemsets, start=1):
            end = starts[-1] + len(x.items)
            for qi in x.items:
                key = (qi.item, qi.quantity)
                got = memo.get(key)
                if got is None:
                    u = qi.quantity * table[qi.item]
                    d = mf.fuzzify(u)
                    pos_f = tuple(FItem(qi.item, r) for r in range(n_regions) if d[r] > 0.0)
                    got = memo[key] = (u, d, u * max(d), pos_f)
                rows.setdefault(qi.item, []).append(len(items))
                items.append(qi.item)
                itemset_of.append(j)
                ends.append(end)
                util.append(got[0])
                degs.append(got[1])
                mf_u.append(got[2])
                fitems.append(got[3])
            starts.append(end)
        # single backward pass for the remaining field
        remaining = [0.0] * len(items)
        acc = 0.0
        for pos in range(len(items) - 1, -1, -1):
            remaining[pos] = acc
            acc += mf_u[pos]
        fm.items, fm.itemset_of, fm.starts, fm.ends = items, itemset_of, starts, ends
        fm.utility, fm.degrees, fm.mfui, fm.remaining = util, degs, mf_u, remaining
        fm.fitems, fm.rows, fm.mfsu = fitems, rows, acc
        matrices[qs.sid] = fm
        mfsus[qs.sid] = acc
    return FMatrixSet(matrices, mfsus, table, mf)


class ChainElement(NamedTuple):
    pos: int  # flat index of the extension anchor; FMatrix.anchor() gives (itemset, item)
    fu: float
    mrfu: float


class HeadEntry(NamedTuple):
    sid: int
    sdfu: float


def sequence_sdfu(elements) -> float:
    best = 0.0
    for _, fu, rest in elements:
        if rest > 0.0 and fu + rest > best:
            best = fu + rest
    return best


class FuzzyUtilityChain:
    """Projected database of one pattern: a head table plus one element list per sequence.

    Elements are plain ``(pos, fu, mrfu)`` tuples in ascending ``pos`` order.
    """

    __slots__ = ("sids", "sdfus", "lists", "fu", "sdfu", "size")

    def __init__(self, sids: list[int], lists: list[list[tuple]]):
        self.sids = sids
        self.lists = lists
        sd = []
        fu = total = 0.0
        size = 0
        for els in lists:
            best = top = 0.0
            for _, f, rest in els:
                if f > top:
                    top = f
                if rest > 0.0 and f + rest > best:
                    best = f + rest
            sd.append(best)
            total += best
            fu += top
            size += len(els)
        self.sdfus = sd
        self.fu = fu
        self.sdfu = total
        self.size = size

    def __len__(self):
        return len(self.sids)

    def __bool__(self):
        return bool(self.sids)

    @property
    def head(self) -> list[HeadEntry]:
        return [HeadEntry(s, v) for s, v in zip(self.sids, self.sdfus)]

    def elements(self, sid: int) -> list[ChainElement]:
        i = self.sids.index(sid)
        return [ChainElement(*e) for e in self.lists[i]]

    def fu_per_sequence(self) -> dict[int, float]:
        return {s: max(e[1] for e in els) for s, els in zip(self.sids, self.lists)}

    def __repr__(self):
        return f"FuzzyUtilityChain({len(self.sids)} sequences, fu={self.fu:.4f}, sdfu={self.sdfu:.4f})"


def build_initial_chains(db: QDatabase, fms: FMatrixSet, mf: MembershipFunction | None = None, keep=None) -> dict[FItem, FuzzyUtilityChain]:
    """Chains of every 1-f-sequence with positive membership somewhere.

    ``keep`` optionally restricts construction to a set of f-items.
    """
    sids: dict[FItem, list[int]] = {}
    lists: dict[FItem, list[list[tuple]]] = {}
    for qs in db.sequences:
        fm = fms.matrices[qs.sid]
        local: dict[FItem, list[tuple]] = {}
        util, degs, rem = fm.utility, fm.degrees, fm.remaining
        for pos, fis in enumerate(fm.fitems):
            for fi in fis:
                if keep is not None and fi not in keep:
                    continue
                el = (pos, util[pos] * degs[pos][fi.region], rem[pos])
                got = local.get(fi)
                if got is None:
                    local[fi] = [el]
                else:
                    got.append(el)
        for fi, els in local.items():
            if fi in sids:
                sids[fi].append(qs.sid)
                lists[fi].append(els)
            else:
                sids[fi] = [qs.sid]
                lists[fi] = [els]
    return {fi: FuzzyUtilityChain(sids[fi], lists[fi]) for fi in sorted(sids)}


def _chain(sids, lists, sdfus, fu, total, size) -> FuzzyUtilityChain:
    """Assemble a chain whose summary values the caller already computed."""
    c = FuzzyUtilityChain.__new__(FuzzyUtilityChain)
    c.sids, c.lists, c.sdfus, c.fu, c.sdfu, c.size = sids, lists, sdfus, fu, total, size
    return c


def project_i(chain: FuzzyUtilityChain, ext: FItem, fms: FMatrixSet) -> FuzzyUtilityChain:
    item, r = ext
    out_sids, out_lists, out_sd = [], [], []
    fu_sum = sd_sum = 0.0
    size = 0
    matrices = fms.matrices
    for sid, els in zip(chain.sids, chain.lists):
        fm = matrices[sid]
        row = fm.rows.get(item)
        if row is None:
            continue
        iof, util, degs, rem = fm.itemset_of, fm.utility, fm.degrees, fm.remaining
        new = []
        top = best = 0.0
        i, n = 0, len(els)
        for occ in row:
            d = degs[occ][r]
            if d <= 0.0:
                continue
            j = iof[occ]
            # the prefix anchor in itemset j (at most one: item ids are unique per itemset)
            while i < n and iof[els[i][0]] < j:
                i += 1
            if i < n and iof[els[i][0]] == j and els[i][0] < occ:
                f = els[i][1] + util[occ] * d
                rest = rem[occ]
                new.append((occ, f, rest))
                if f > top:
                    top = f
                if rest > 0.0 and f + rest > best:
                    best = f + rest
        if new:
            out_sids.append(sid)
            out_lists.append(new)
            out_sd.append(best)
            fu_sum += top
            sd_sum += best
            size += len(new)
    return _chain(out_sids, out_lists, out_sd, fu_sum, sd_sum, size)


def project_s(chain: FuzzyUtilityChain, ext: FItem, fms: FMatrixSet) -> FuzzyUtilityChain:
    item, r = ext
    out_sids, out_lists, out_sd = [], [], []
    fu_sum = sd_sum = 0.0
    size = 0
    matrices = fms.matrices
    neg = float("-inf")
    for sid, els in zip(chain.sids, chain.lists):
        fm = matrices[sid]
        row = fm.rows.get(item)
        if row is None:
            continue
        iof, util, degs, rem = fm.itemset_of, fm.utility, fm.degrees, fm.remaining
        new = []
        top = best = 0.0
        i, n = 0, len(els)
        prev = neg
        for occ in row:
            d = degs[occ][r]
            if d <= 0.0:
                continue
            j = iof[occ]
            # fold in every prefix anchor from an earlier itemset
            while i < n and iof[els[i][0]] < j:
                if els[i][1] > prev:
                    prev = els[i][1]
                i += 1
            if prev > neg:
                f = prev + util[occ] * d
                rest = rem[occ]
                new.append((occ, f, rest))
                if f > top:
                    top = f
                if rest > 0.0 and f + rest > best:
                    best = f + rest
        if new:
            out_sids.append(sid)
            out_lists.append(new)
            out_sd.append(best)
            fu_sum += top
            sd_sum += best
            size += len(new)
    return _chain(out_sids, out_lists, out_sd, fu_sum, sd_sum, size)


def extend(prefix: FSequence, ext: FItem, kind: str) -> FSequence:
    if kind == I_EXT:
        if not prefix:
            raise ValidationError("cannot I-extend an empty pattern")
        if not ext.item > prefix[-1][-1].item:
            raise ValidationError(
                f"I-extension item {ext.item!r} must sort after {prefix[-1][-1].item!r}"
            )
        return prefix[:-1] + (prefix[-1] + (ext,),)
    if kind == S_EXT:
        return prefix + ((ext,),)
    raise ValueError(f"unknown extension kind {kind!r}")


def project(prefix: FSequence, chain: FuzzyUtilityChain, ext: FItem, kind: str, fms: FMatrixSet) -> FuzzyUtilityChain:
    """Chain of ``prefix`` extended by ``ext``, built from the prefix chain."""
    extend(prefix, ext, kind)  # validates ordering
    if kind == I_EXT:
        return project_i(chain, ext, fms)
    return project_s(chain, ext, fms)


def chain_of(fs: FSequence, db: QDatabase, fms: FMatrixSet) -> FuzzyUtilityChain:
    """Chain of an arbitrary pattern, by repeated projection from its first f-item."""
    first = fs[0][0]
    chain = build_initial_chains(db, fms, keep={first}).get(first)
    if chain is None:
        return FuzzyUtilityChain([], [])
    prefix: FSequence = ((first,),)
    for v, fx in enumerate(fs):
        for w, fi in enumerate(fx):
            if v == 0 and w == 0:
                continue
            kind = I_EXT if w > 0 else S_EXT
            chain = project(prefix, chain, fi, kind, fms)
            prefix = extend(prefix, fi, kind)
    return chain
