"""Text formats for databases, utility tables, membership functions, results and stats.

Database (one q-sequence per line, single-space separated tokens)::

    b:2 d:3 -1 a:3 e:2 -1 b:1 c:4 e:3 -1 -2

``-1`` closes an itemset, ``-2`` closes the sequence, lines starting with
``#`` are comments. SIDs are assigned from 1 in line order.

Utility table: ``item value`` per line. Membership function: one region per
line, ``region <label> u1:f1 u2:f2 ...``. Result file: one pattern per line,
f-items as ``item.Label``, itemsets separated by ``-1``, closed by ``-2``, then
``#FU: <value>`` with four decimals; a final ``# patterns: N`` line.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np

from .miner import MiningConfig, MiningResult, MiningStats
from .model import (
    FItem,
    FSequence,
    MembershipFunction,
    QDatabase,
    QItem,
    QItemset,
    QSequence,
    UnknownItemError,
    UtilityTable,
    ValidationError,
)

PathLike = str | os.PathLike


class ParseError(ValidationError):
    def __init__(self, msg, path=None, line=None, col=None):
        self.path, self.line, self.col = path, line, col
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if col is not None:
                where += f"{col}:"
        super().__init__(f"{where} {msg}" if where else msg)


class MissingUtilityError(ParseError, UnknownItemError):
    def __init__(self, item, path=None, line=None, col=None):
        ParseError.__init__(self, f"item {item!r} has no external utility", path, line, col)
        self.item = item  # set last: the cooperative __init__ chain also assigns it

    __str__ = ParseError.__str__


def format_number(x: float) -> str:
    """Shortest round-tripping text, without a trailing ``.0`` for integers."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_fu(x: float) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN))


def _tokens(line: str):
    """(column, token) pairs for single-space separated text; columns 1-based."""
    col = 1
    for tok in line.split(" "):
        yield col, tok
        col += len(tok) + 1


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield n, line


# ---------------------------------------------------------------------------
# utility table


def parse_utility_table_text(text: str, path=None) -> UtilityTable:
    entries: dict[str, float] = {}
    for n, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'item value', got {line!r}", path, n)
        item, raw = parts
        try:
            value = float(Decimal(raw))
        except ArithmeticError:
            raise ParseError(f"bad external utility {raw!r}", path, n, len(item) + 2) from None
        if not value > 0:
            raise ParseError(f"external utility of {item!r} must be positive, got {raw}", path, n, len(item) + 2)
        if item in entries:
            raise ParseError(f"duplicate utility entry for {item!r}", path, n, 1)
        entries[item] = value
    return UtilityTable(entries)


def parse_utility_table(path: PathLike) -> UtilityTable:
    return parse_utility_table_text(Path(path).read_text(encoding="utf-8"), path)


def format_utility_table(table: UtilityTable) -> str:
    return "".join(f"{item} {format_number(table[item])}\n" for item in sorted(table))


def write_utility_table(table: UtilityTable, path: PathLike) -> None:
    Path(path).write_text(format_utility_table(table), encoding="utf-8")


# ---------------------------------------------------------------------------
# database


def parse_sequence_line(line: str, sid: int, table: Mapping | None = None, path=None, n=None) -> QSequence:
    itemsets: list[QItemset] = []
    current: dict[str, QItem] = {}
    closed = False
    for col, tok in _tokens(line):
        if closed:
            raise ParseError(f"token {tok!r} after end of sequence", path, n, col)
        if tok == "-1":
            if not current:
                raise ParseError("empty itemset", path, n, col)
            itemsets.append(QItemset(tuple(current[k] for k in sorted(current))))
            current = {}
        elif tok == "-2":
            if current:
                raise ParseError("itemset not closed with -1 before -2", path, n, col)
            closed = True
        else:
            item, sep, raw = tok.rpartition(":")
            if not sep or not item:
                raise ParseError(f"malformed q-item {tok!r}", path, n, col)
            try:
                q = int(raw)
            except ValueError:
                raise ParseError(f"malformed quantity in {tok!r}", path, n, col) from None
            if q < 1:
                raise ParseError(f"quantity must be >= 1 in {tok!r}", path, n, col)
            if item in current:
                raise ParseError(f"duplicate item {item!r} in itemset", path, n, col)
            if table is not None and item not in table:
                raise MissingUtilityError(item, path, n, col)
            current[item] = QItem(item, q)
    if not closed:
        raise ParseError("sequence not terminated by -2", path, n)
    if not itemsets:
        raise ParseError("empty sequence", path, n)
    return QSequence(sid, tuple(itemsets))


def parse_database_text(text: str, table: UtilityTable, path=None) -> QDatabase:
    seqs = []
    for n, line in _lines(text):
        seqs.append(parse_sequence_line(line, len(seqs) + 1, table, path, n))
    return QDatabase(tuple(seqs), table)


def parse_database(path: PathLike, utility_path: PathLike) -> QDatabase:
    table = parse_utility_table(utility_path)
    return parse_database_text(Path(path).read_text(encoding="utf-8"), table, path)


def format_sequence(qs: QSequence) -> str:
    parts = []
    for x in qs.itemsets:
        parts.extend(f"{qi.item}:{qi.quantity}" for qi in x.items)
        parts.append("-1")
    parts.append("-2")
    return " ".join(parts)


def format_database(db: QDatabase) -> str:
    return "".join(format_sequence(qs) + "\n" for qs in db.sequences)


def write_database(db: QDatabase, path: PathLike, utility_path: PathLike | None = None) -> None:
    Path(path).write_text(format_database(db), encoding="utf-8")
    if utility_path is not None:
        write_utility_table(db.utility_table, utility_path)


# ---------------------------------------------------------------------------
# membership function


def parse_membership_text(text: str, path=None) -> MembershipFunction:
    curves = []
    for n, line in _lines(text):
        toks = list(_tokens(line.strip()))
        if len(toks) < 3 or toks[0][1] != "region":
            raise ParseError("expected 'region <label> u:f ...'", path, n, 1)
        label = toks[1][1]
        vertices = []
        for col, tok in toks[2:]:
            u, sep, f = tok.partition(":")
            if not sep:
                raise ParseError(f"malformed vertex {tok!r}", path, n, col)
            try:
                u, f = float(u), float(f)
            except ValueError:
                raise ParseError(f"malformed vertex {tok!r}", path, n, col) from None
            if not 0.0 <= f <= 1.0:
                raise ParseError(f"degree {f} outside [0, 1]", path, n, col)
            if vertices and not u > vertices[-1][0]:
                raise ParseError("breakpoints must increase strictly", path, n, col)
            vertices.append((u, f))
        curves.append((label, vertices))
    if not curves:
        raise ParseError("no regions defined", path)
    try:
        return MembershipFunction(curves)
    except ValidationError as e:
        raise ParseError(str(e), path) from None


def parse_membership(path: PathLike) -> MembershipFunction:
    return parse_membership_text(Path(path).read_text(encoding="utf-8"), path)


def format_membership(mf: MembershipFunction) -> str:
    lines = []
    for region, curve in zip(mf.regions, mf.curves):
        verts = " ".join(f"{format_number(u)}:{d!r}" for u, d in curve)
        lines.append(f"region {region.label} {verts}\n")
    return "".join(lines)


def write_membership(mf: MembershipFunction, path: PathLike) -> None:
    Path(path).write_text(format_membership(mf), encoding="utf-8")


# ---------------------------------------------------------------------------
# results


def format_pattern_tokens(fs: FSequence, labels) -> str:
    return " -1 ".join(" ".join(f"{fi.item}.{labels[fi.region]}" for fi in fx) for fx in fs) + " -2"


def format_results(result: MiningResult, labels=None) -> str:
    labels = labels or result.labels
    out = [f"{format_pattern_tokens(fs, labels)} #FU: {format_fu(fu)}\n" for fs, fu in result.patterns]
    out.append(f"# patterns: {len(result.patterns)}\n")
    return "".join(out)


def write_results(result: MiningResult, path: PathLike, labels=None) -> None:
    Path(path).write_text(format_results(result, labels), encoding="utf-8")


def parse_results_text(text: str, labels, path=None) -> MiningResult:
    index = {label: k for k, label in enumerate(labels)}
    patterns = []
    declared = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("patterns:"):
                declared = int(body.split(":", 1)[1])
            continue
        body, sep, fu = line.partition(" #FU: ")
        if not sep:
            raise ParseError("missing '#FU:' field", path, n)
        toks = body.split(" ")
        if toks[-1] != "-2":
            raise ParseError("pattern must end with -2", path, n)
        fs, fx = [], []
        for tok in toks[:-1]:
            if tok == "-1":
                if not fx:
                    raise ParseError("empty f-itemset", path, n)
                fs.append(tuple(fx))
                fx = []
                continue
            item, dot, label = tok.rpartition(".")
            if not dot or label not in index:
                raise ParseError(f"malformed f-item {tok!r}", path, n)
            fx.append(FItem(item, index[label]))
        if not fx:
            raise ParseError("empty f-itemset", path, n)
        fs.append(tuple(fx))
        patterns.append((tuple(fs), float(fu)))
    if declared is not None and declared != len(patterns):
        raise ParseError(f"summary says {declared} patterns, found {len(patterns)}", path)
    return MiningResult(patterns, MiningStats(), tuple(labels))


def parse_results(path: PathLike, labels) -> MiningResult:
    if isinstance(labels, MembershipFunction):
        labels = labels.labels
    return parse_results_text(Path(path).read_text(encoding="utf-8"), labels, path)


# ---------------------------------------------------------------------------
# stats


@dataclass(frozen=True)
class Descriptors:
    sequences: int  # |D|
    items: int  # |I|
    avg_length: float  # avg(S)
    max_length: int  # max(S)
    avg_itemsets: float  # #Seq
    avg_itemset_size: float  # #Ele


def describe(db: QDatabase) -> Descriptors:
    n = len(db.sequences)
    if n == 0:
        return Descriptors(0, 0, 0.0, 0, 0.0, 0.0)
    lengths = [len(qs) for qs in db.sequences]
    n_itemsets = sum(len(qs.itemsets) for qs in db.sequences)
    return Descriptors(
        sequences=n,
        items=len(db.items()),
        avg_length=sum(lengths) / n,
        max_length=max(lengths),
        avg_itemsets=n_itemsets / n,
        avg_itemset_size=sum(lengths) / n_itemsets,
    )


def format_stats(result: MiningResult, db: QDatabase, cfg: MiningConfig | None = None, algorithm: str = "pgfum") -> str:
    d = describe(db)
    s = result.stats
    rows = [("algorithm", algorithm)]
    if cfg is not None:
        rows += [
            ("min_ratio", format_number(cfg.xi)),
            ("ppo", "on" if cfg.enable_ppo else "off"),
            ("eud", "on" if cfg.enable_eud else "off"),
            ("pes", "on" if cfg.enable_pes else "off"),
            ("max_length", "none" if cfg.max_length is None else str(cfg.max_length)),
            ("parallel", str(cfg.parallel_width)),
        ]
    rows += [
        ("sequences", str(d.sequences)),
        ("items", str(d.items)),
        ("avg_length", f"{d.avg_length:.2f}"),
        ("max_length_seq", str(d.max_length)),
        ("avg_itemsets", f"{d.avg_itemsets:.2f}"),
        ("avg_itemset_size", f"{d.avg_itemset_size:.2f}"),
        ("total_utility", format_fu(db.total_utility)),
        ("patterns", str(len(result.patterns))),
        ("candidates", str(s.candidates)),
        ("chains_built", str(s.chains_built)),
        ("pruned_ppo", str(s.pruned_ppo)),
        ("pruned_eud", str(s.pruned_eud)),
        ("pruned_pes", str(s.pruned_pes)),
        ("peak_live_elements", str(s.peak_live_elements)),
        ("runtime_ms", f"{s.runtime_ms:.1f}"),
    ]
    return "".join(f"{k}: {v}\n" for k, v in rows)


def write_stats(result: MiningResult, db: QDatabase, path: PathLike, cfg: MiningConfig | None = None, algorithm: str = "pgfum") -> None:
    Path(path).write_text(format_stats(result, db, cfg, algorithm), encoding="utf-8")


def parse_stats(path: PathLike) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            k, _, v = line.partition(":")
            out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# synthetic generator


@dataclass(frozen=True)
class GeneratorParams:
    n_sequences: int
    n_items: int
    max_seq_itemsets: int
    max_itemset_size: int
    max_quantity: int
    utility_range: tuple[float, float] = (1.0, 10.0)
    seed: int = 0
    skew: float = 0.0  # Zipf exponent of item popularity; 0 draws items uniformly

    def __post_init__(self):
        for name in ("n_sequences", "n_items", "max_seq_itemsets", "max_itemset_size", "max_quantity"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        lo, hi = self.utility_range
        if not 0 < lo <= hi:
            raise ValidationError(f"utility range must satisfy 0 < min <= max, got {self.utility_range}")
        if self.skew < 0:
            raise ValidationError(f"skew must be >= 0, got {self.skew}")


def item_names(n: int) -> list[str]:
    """Zero-padded so that string order matches numeric order."""
    width = len(str(n))
    return [f"i{k:0{width}d}" for k in range(1, n + 1)]


def synthesize(params: GeneratorParams) -> tuple[str, str]:
    """Database text and utility-table text for ``params``.

    Each sequence draws its itemset count uniformly from 1..max_seq_itemsets
    and each itemset its size from 1..max_itemset_size; items are drawn with
    replacement and collapsed, so an itemset can come out a little smaller.
    """
    rng = np.random.default_rng(params.seed)
    names = item_names(params.n_items)
    lo, hi = params.utility_range
    prices = np.maximum(np.round(rng.uniform(lo, hi, params.n_items), 2), 0.01)
    weights = np.arange(1, params.n_items + 1, dtype=float) ** -params.skew
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0

    n_sets = rng.integers(1, params.max_seq_itemsets + 1, params.n_sequences)
    sizes = rng.integers(1, min(params.max_itemset_size, params.n_items) + 1, int(n_sets.sum()))
    picks = np.searchsorted(cdf, rng.random(int(sizes.sum())), side="right")
    qty = rng.integers(1, params.max_quantity + 1, len(picks))

    lines = []
    at = k = 0
    for n in n_sets:
        toks = []
        for size in sizes[k : k + n]:
            chosen = {}
            for c, q in zip(picks[at : at + size].tolist(), qty[at : at + size].tolist()):
                chosen.setdefault(c, q)
            at += size
            toks.extend(f"{names[c]}:{chosen[c]}" for c in sorted(chosen))
            toks.append("-1")
        k += n
        toks.append("-2")
        lines.append(" ".join(toks) + "\n")
    ut = "".join(f"{name} {format_number(p)}\n" for name, p in zip(names, prices.tolist()))
    return "".join(lines), ut


def generate_synthetic(params: GeneratorParams, db_path: PathLike, utility_path: PathLike) -> None:
    db_text, ut_text = synthesize(params)
    Path(db_path).write_text(db_text, encoding="utf-8")
    Path(utility_path).write_text(ut_text, encoding="utf-8")
