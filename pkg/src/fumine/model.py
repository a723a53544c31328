"""Input-side domain types: quantitative sequences, utility tables, membership functions, f-patterns."""

from __future__ import annotations

import math
from bisect import bisect_right
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from itertools import chain
from typing import NamedTuple


class FumineError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FumineError, ValueError):
    pass


class ConfigError(FumineError, ValueError):
    pass


class UnknownItemError(FumineError, KeyError):
    def __init__(self, item):
        super().__init__(item)
        self.item = item

    def __str__(self):
        return f"item {self.item!r} has no external utility"


class NodeBudgetExceeded(FumineError, RuntimeError):
    pass


# ---------------------------------------------------------------------------
# crisp utility side


class UtilityTable(Mapping):
    """Item -> external utility (unit profit). Read-only."""

    __slots__ = ("_p",)

    def __init__(self, entries: Mapping[str, float] | Iterable[tuple[str, float]] = ()):
        p = dict(entries)
        for item, value in p.items():
            value = float(value)
            if not value > 0 or not math.isfinite(value):
                raise ValidationError(f"external utility of {item!r} must be positive, got {value}")
            p[item] = value
        self._p = p

    def __getitem__(self, item: str) -> float:
        try:
            return self._p[item]
        except KeyError:
            raise UnknownItemError(item) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._p)

    def __len__(self) -> int:
        return len(self._p)

    def __eq__(self, other):
        if isinstance(other, UtilityTable):
            return self._p == other._p
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._p.items()))

    def __repr__(self):
        return f"UtilityTable({self._p!r})"


@dataclass(frozen=True, slots=True)
class QItem:
    item: str
    quantity: int

    def __post_init__(self):
        if isinstance(self.quantity, bool) or not isinstance(self.quantity, int):
            raise ValidationError(f"quantity of {self.item!r} must be an integer")
        if self.quantity < 1:
            raise ValidationError(f"quantity of {self.item!r} must be >= 1, got {self.quantity}")

    def utility(self, table: UtilityTable) -> float:
        return self.quantity * table[self.item]


@dataclass(frozen=True, slots=True)
class QItemset:
    items: tuple[QItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValidationError("q-itemset must not be empty")
        ids = [qi.item for qi in self.items]
        for a, b in zip(ids, ids[1:]):
            if not a < b:
                raise ValidationError(f"q-itemset items must be distinct and ascending: {ids}")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def index_of(self, item: str) -> int | None:
        for k, qi in enumerate(self.items):
            if qi.item == item:
                return k
        return None


@dataclass(frozen=True, slots=True)
class QSequence:
    sid: int
    itemsets: tuple[QItemset, ...]

    def __post_init__(self):
        object.__setattr__(self, "itemsets", tuple(self.itemsets))
        if not self.itemsets:
            raise ValidationError(f"q-sequence {self.sid} must not be empty")
        if self.sid < 0:
            raise ValidationError(f"sid must be non-negative, got {self.sid}")

    def __len__(self):
        """Number of q-items, |QS|."""
        return sum(len(x) for x in self.itemsets)

    @property
    def size(self) -> int:
        return len(self.itemsets)

    def qitem(self, itemset_index: int, item_index: int) -> QItem:
        """1-based itemset index, 0-based item index."""
        return self.itemsets[itemset_index - 1].items[item_index]

    def flat(self) -> Iterator[tuple[int, int, QItem]]:
        """Yields (itemset_index 1-based, item_index, qitem) in sequence order."""
        for j, x in enumerate(self.itemsets, start=1):
            for k, qi in enumerate(x.items):
                yield j, k, qi

    def items(self) -> set[str]:
        return {qi.item for x in self.itemsets for qi in x.items}


def utility_of_qitem(qi: QItem, table: UtilityTable) -> float:
    return qi.quantity * table[qi.item]


def utility_of_qsequence(qs: QSequence, table: UtilityTable) -> float:
    return sum(qi.quantity * table[qi.item] for x in qs.itemsets for qi in x.items)


@dataclass(frozen=True)
class QDatabase:
    sequences: tuple[QSequence, ...]
    utility_table: UtilityTable
    total_utility: float = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        seen = set()
        for qs in self.sequences:
            if qs.sid in seen:
                raise ValidationError(f"duplicate sid {qs.sid}")
            seen.add(qs.sid)
        total = sum(utility_of_qsequence(qs, self.utility_table) for qs in self.sequences)
        object.__setattr__(self, "total_utility", total)

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def items(self) -> list[str]:
        out = set()
        for qs in self.sequences:
            out |= qs.items()
        return sorted(out)


def utility_of_database(db: QDatabase) -> float:
    return db.total_utility


def make_database(rows, utilities: Mapping[str, float], first_sid: int = 1) -> QDatabase:
    """Build a database from nested python lists.

    ``rows`` is a list of sequences, each a list of itemsets, each a list of
    ``(item, quantity)`` pairs. Items inside an itemset are sorted here.
    """
    seqs = []
    for n, row in enumerate(rows):
        itemsets = [QItemset(tuple(QItem(i, q) for i, q in sorted(x))) for x in row]
        seqs.append(QSequence(first_sid + n, tuple(itemsets)))
    return QDatabase(tuple(seqs), UtilityTable(utilities))


# ---------------------------------------------------------------------------
# fuzzy side


@dataclass(frozen=True, slots=True)
class Region:
    index: int
    label: str


class MembershipFunction:
    """Piecewise-linear membership curves, one per region.

    Each curve is a list of ``(utility, degree)`` vertices with strictly
    increasing utilities. Between vertices the degree is interpolated
    linearly; outside the breakpoint range it is clamped to the end vertex.
    """

    __slots__ = ("regions", "curves", "_xs", "_ys", "_cache")

    def __init__(self, curves: Mapping[str, Iterable[tuple[float, float]]] | Iterable[tuple[str, Iterable[tuple[float, float]]]]):
        if isinstance(curves, Mapping):
            curves = curves.items()
        regions, xs, ys, cs = [], [], [], []
        for k, (label, vertices) in enumerate(curves):
            vertices = tuple((float(u), float(d)) for u, d in vertices)
            if not label or any(ch.isspace() for ch in label):
                raise ValidationError(f"bad region label {label!r}")
            if not vertices:
                raise ValidationError(f"region {label!r} has no vertices")
            for u, d in vertices:
                if not (0.0 <= d <= 1.0):
                    raise ValidationError(f"region {label!r}: degree {d} outside [0, 1]")
                if not math.isfinite(u):
                    raise ValidationError(f"region {label!r}: breakpoint {u} is not finite")
            for (u0, _), (u1, _) in zip(vertices, vertices[1:]):
                if not u1 > u0:
                    raise ValidationError(f"region {label!r}: breakpoints must increase strictly")
            regions.append(Region(k, label))
            cs.append(vertices)
            xs.append([u for u, _ in vertices])
            ys.append([d for _, d in vertices])
        if not regions:
            raise ValidationError("membership function needs at least one region")
        labels = [r.label for r in regions]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate region labels: {labels}")
        self.regions = tuple(regions)
        self.curves = tuple(cs)
        self._xs = xs
        self._ys = ys
        self._cache = {}

    def __len__(self):
        return len(self.regions)

    def __eq__(self, other):
        if isinstance(other, MembershipFunction):
            return self.regions == other.regions and self.curves == other.curves
        return NotImplemented

    def __hash__(self):
        return hash((self.regions, self.curves))

    def __repr__(self):
        inner = ", ".join(f"{r.label}={list(c)}" for r, c in zip(self.regions, self.curves))
        return f"MembershipFunction({inner})"

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.regions)

    def region(self, key: int | str) -> Region:
        if isinstance(key, str):
            for r in self.regions:
                if r.label == key:
                    return r
            raise KeyError(f"no region labelled {key!r}")
        return self.regions[key]

    def degree(self, region: int, u: float) -> float:
        xs, ys = self._xs[region], self._ys[region]
        if u <= xs[0]:
            return ys[0]
        if u >= xs[-1]:
            return ys[-1]
        k = bisect_right(xs, u)
        x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
        return y0 + (y1 - y0) * (u - x0) / (x1 - x0)

    def fuzzify(self, u: float) -> tuple[float, ...]:
        """Degrees for every region; memoised since utilities repeat a lot."""
        got = self._cache.get(u)
        if got is None:
            got = tuple(self.degree(k, u) for k in range(len(self.regions)))
            if len(self._cache) < 1 << 16:
                self._cache[u] = got
        return got


def membership(mf: MembershipFunction, region: Region | int | str, u: float) -> float:
    if isinstance(region, Region):
        region = region.index
    elif isinstance(region, str):
        region = mf.region(region).index
    return mf.degree(region, u)


def reference_membership() -> MembershipFunction:
    """Three overlapping triangles (Low / Middle / High) over utilities 1..11."""
    return MembershipFunction(
        [
            ("Low", [(1, 1.0), (6, 0.0)]),
            ("Middle", [(1, 0.0), (6, 1.0), (11, 0.0)]),
            ("High", [(6, 0.0), (11, 1.0)]),
        ]
    )


class FItem(NamedTuple):
    item: str
    region: int


# An f-itemset is a tuple of FItem with strictly ascending item ids; an
# f-sequence is a non-empty tuple of f-itemsets.
FItemset = tuple[FItem, ...]
FSequence = tuple[FItemset, ...]


def fsequence(*itemsets, mf: MembershipFunction | None = None) -> FSequence:
    """Convenience constructor.

    >>> fsequence([("a", "Middle")], [("e", "Middle")], mf=reference_membership())
    ((FItem(item='a', region=1),), (FItem(item='e', region=1),))
    """
    out = []
    for x in itemsets:
        fx = []
        for item, region in x:
            if isinstance(region, str):
                if mf is None:
                    raise ValueError("region labels need a membership function")
                region = mf.region(region).index
            fx.append(FItem(item, region))
        out.append(tuple(fx))
    fs = tuple(out)
    validate_fsequence(fs)
    return fs


def validate_fsequence(fs: FSequence) -> None:
    if not fs:
        raise ValidationError("f-sequence must not be empty")
    for fx in fs:
        if not fx:
            raise ValidationError("f-itemset must not be empty")
        for a, b in zip(fx, fx[1:]):
            if not a.item < b.item:
                raise ValidationError(f"f-itemset items must be strictly ascending: {fx}")


def pattern_length(fs: FSequence) -> int:
    return sum(len(fx) for fx in fs)


def pattern_sort_key(fs: FSequence):
    """Shortlex over (item, region), then itemset boundaries."""
    flat = tuple(chain.from_iterable(fs))
    return (len(flat), flat, tuple(map(len, fs)))


def is_prefix(prefix: FSequence, fs: FSequence) -> bool:
    """True if ``fs`` is reachable from ``prefix`` by zero or more I/S-extensions."""
    m = len(prefix)
    if m == 0 or m > len(fs):
        return False
    if prefix[: m - 1] != fs[: m - 1]:
        return False
    last = prefix[-1]
    return fs[m - 1][: len(last)] == last


def format_pattern(fs: FSequence, mf: MembershipFunction) -> str:
    """Render as ``<{(a:Middle)},{(e:Middle)}>``."""
    parts = []
    for fx in fs:
        parts.append("{" + " ".join(f"({fi.item}:{mf.regions[fi.region].label})" for fi in fx) + "}")
    return "<" + ",".join(parts) + ">"
