"""Acceptance checks, one test per criterion.

Each test prints and records a single PASS or FAIL line; the lines are
repeated in the pytest terminal summary. The collector stays off for the
module because the corpus runs keep hundreds of thousands of small tuples
alive between checks.
"""

from __future__ import annotations

import gc
import itertools
import math
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from _util import MF, VERDICTS, pat
from fumine import fuzzy, io
from fumine.baselines import DEFAULT_NODE_BUDGET, brute_force_sweep, pfus_like_mine
from fumine.datasets import random_database, running_example
from fumine.miner import MiningConfig, MiningTrace, eifu_of_extensions, hfsuub, mine, sdfu
from fumine.model import FItem, utility_of_database
from fumine.structures import S_EXT, build_fmatrix_set, chain_of

SEEDS = range(100)
XIS = (0.005, 0.01, 0.05, 0.2)
TOL = 1e-9
ALL_ON = (True, True, True)
ALL_OFF = (False, False, False)
SUBSETS = list(itertools.product([True, False], repeat=3))


@pytest.fixture(scope="module", autouse=True)
def collector_off():
    was = gc.isenabled()
    gc.disable()
    yield
    if was:
        gc.enable()
    gc.collect()


@contextmanager
def criterion(n: int, title: str):
    """Record PASS when the block finishes, FAIL with the reason when it raises."""
    notes: list[str] = []
    try:
        yield notes
    except BaseException as e:
        reason = str(e).splitlines()[0] if str(e) else type(e).__name__
        line = f"FAIL criterion {n}: {title} ({reason[:200]})"
        VERDICTS.append(line)
        print(line)
        raise
    line = f"PASS criterion {n}: {title}" + (f" ({'; '.join(notes)})" if notes else "")
    VERDICTS.append(line)
    print(line)


def close(a: float, b: float) -> bool:
    return abs(a - b) <= TOL


def fu_map(result) -> dict:
    return dict(result.patterns)


def same_patterns(a: dict, b: dict) -> bool:
    return a.keys() == b.keys() and all(close(a[k], b[k]) for k in a)


@pytest.fixture(scope="module")
def corpus():
    return [random_database(seed) for seed in SEEDS]


@pytest.fixture(scope="module")
def corpus_fms(corpus):
    return [build_fmatrix_set(d, MF) for d in corpus]


@pytest.fixture(scope="module")
def all_on_sets():
    """Pattern sets of the all-on miner per database and xi, filled by criterion 2."""
    return {}


# ---------------------------------------------------------------------------


def test_criterion_1_running_example():
    with criterion(1, "running-example values") as notes:
        t0 = time.perf_counter()
        db = running_example()
        t = db.utility_table
        qs = {s.sid: s for s in db.sequences}
        fms = build_fmatrix_set(db, MF)
        amid_emid = pat("a:Middle", "e:Middle")
        chain = chain_of(amid_emid, db, fms)
        checks = {
            "u(D)": (utility_of_database(db), 171),
            "fu(e:Low, 2, QS1)": (fuzzy.fu_fitemset_at(pat("e:Low")[0], 2, qs[1], t, MF), 1.6),
            "fu(e:Middle, 2, QS1)": (fuzzy.fu_fitemset_at(pat("e:Middle")[0], 2, qs[1], t, MF), 2.4),
            "fu({b:Low d:High}, 1, QS1)": (fuzzy.fu_fitemset_at(pat("b:Low d:High")[0], 1, qs[1], t, MF), 13.6),
            "fu(<b:Low, e:Middle>, QS1)": (fuzzy.fu_in_sequence(pat("b:Low", "e:Middle"), qs[1], t, MF), 7.6),
            "MFUI(e, 2, QS1)": (fuzzy.mfui("e", 2, qs[1], t, MF), 2.4),
            "MFSU(QS1)": (fuzzy.mfsu(qs[1], t, MF), 41.0),
            "MFSU(QS2)": (fuzzy.mfsu(qs[2], t, MF), 57.6),
            "MFSU(QS3)": (fuzzy.mfsu(qs[3], t, MF), 26.0),
            "MRFU in QS2": (fuzzy.mrfu(amid_emid, (3, 2), qs[2], t, MF), 20.0),
            "MRFU in QS3": (fuzzy.mrfu(amid_emid, (2, 0), qs[3], t, MF), 16.0),
            "HFSUUB(<e:Low>)": (hfsuub(pat("e:Low"), db, fms), 124.6),
            "SDFU(<a:Middle, e:Middle>)": (sdfu(chain), 45.2),
            "EIFU of d:High S-extension": (eifu_of_extensions(chain, [(FItem("d", 2), S_EXT)], fms)[(FItem("d", 2), S_EXT)], 45.2),
            "remaining(a, 2, QS1)": (fms[1].cell("a", 2).remaining, 21.4),
        }
        elapsed = time.perf_counter() - t0
        wrong = {k: v for k, v in checks.items() if not close(*v)}
        assert not wrong, f"mismatches: {wrong}"
        assert elapsed < 1.0, f"took {elapsed:.3f}s"
        notes.append(f"{len(checks)} values, {elapsed * 1000:.0f} ms")


def test_criterion_2_oracle_equivalence(corpus, corpus_fms, all_on_sets):
    with criterion(2, "mine() equals brute force on 100 databases x 4 thresholds") as notes:
        t0 = time.perf_counter()
        bad = []
        n_patterns = 0
        for seed, db, fms in zip(SEEDS, corpus, corpus_fms):
            oracle = brute_force_sweep(db, MF, XIS)
            for xi in XIS:
                got = fu_map(mine(db, MF, MiningConfig(xi), fms=fms))
                want = fu_map(oracle[xi])
                if not same_patterns(got, want):
                    bad.append((seed, xi))
                all_on_sets[seed, xi] = frozenset(got)
                n_patterns += len(got)
        elapsed = time.perf_counter() - t0
        assert not bad, f"mismatch at (seed, xi) {bad[:5]}"
        assert elapsed < 120, f"took {elapsed:.1f}s"
        notes.append(f"{n_patterns} patterns, {elapsed:.1f}s")


def test_criterion_3_pruning_ablation(corpus, corpus_fms):
    with criterion(3, "8 pruning subsets agree; candidate counts ordered; level-wise baseline not smaller") as notes:
        bad = []
        totals = dict.fromkeys(SUBSETS, 0)
        pfus_total = 0
        for seed, db, fms in zip(SEEDS, corpus, corpus_fms):
            for xi in XIS:
                runs = {sub: mine(db, MF, MiningConfig(xi, *sub), fms=fms) for sub in SUBSETS}
                ref = fu_map(runs[ALL_ON])
                cand = {sub: r.stats.candidates for sub, r in runs.items()}
                for sub, r in runs.items():
                    totals[sub] += cand[sub]
                    if not same_patterns(fu_map(r), ref):
                        bad.append(f"seed {seed} xi {xi}: subset {sub} differs")
                for off in range(3):
                    single = tuple(i != off for i in range(3))
                    if not cand[ALL_ON] <= cand[single] <= cand[ALL_OFF]:
                        bad.append(f"seed {seed} xi {xi}: candidates {cand[ALL_ON]}, {cand[single]}, {cand[ALL_OFF]} for {single}")
                base = pfus_like_mine(db, MF, xi)
                pfus_total += base.stats.candidates
                if base.stats.candidates < cand[ALL_ON]:
                    bad.append(f"seed {seed} xi {xi}: level-wise {base.stats.candidates} < {cand[ALL_ON]}")
                if not same_patterns(fu_map(base), ref):
                    bad.append(f"seed {seed} xi {xi}: level-wise patterns differ")
        assert not bad, f"{len(bad)} violations, first: {bad[0]}"
        notes.append(f"candidates all-on {totals[ALL_ON]}, all-off {totals[ALL_OFF]}, level-wise {pfus_total}")


def test_criterion_4_bound_inequalities(corpus, corpus_fms):
    with criterion(4, "fu never exceeds HFSUUB, SDFU or EIFU of any prefix") as notes:
        checked = 0
        bad = []
        for seed, db, fms in zip(SEEDS, corpus, corpus_fms):
            trace = MiningTrace()
            # everything off walks the whole tree, so every pattern/prefix pair is seen
            mine(db, MF, MiningConfig(0.2, *ALL_OFF), fms=fms, trace=trace)
            # parents are recorded before their children: carry the tightest ancestor bound down
            min_sdfu: dict = {}
            min_eifu: dict = {}
            for fs, (fu, sd) in trace.nodes.items():
                flat = [fi for x in fs for fi in x]
                if fu > min(trace.hfsuub[fi] for fi in flat) + TOL:
                    bad.append(("HFSUUB", seed, fs))
                if len(flat) == 1:
                    min_sdfu[fs], min_eifu[fs] = sd, math.inf
                    continue
                parent = fs[:-1] if len(fs[-1]) == 1 else fs[:-1] + (fs[-1][:-1],)
                above = min_sdfu[parent]
                if fu > above + TOL:
                    bad.append(("SDFU", seed, fs))
                e = min(min_eifu[parent], trace.extensions[fs])
                if fu > e + TOL:
                    bad.append(("EIFU", seed, fs))
                min_sdfu[fs], min_eifu[fs] = min(above, sd), e
                checked += 1
        assert not bad, f"{len(bad)} violations, first: {bad[0]}"
        notes.append(f"{checked} patterns with proper prefixes")


def test_criterion_5_threshold_monotonicity(corpus, corpus_fms, all_on_sets):
    with criterion(5, "raising xi only removes patterns"):
        bad = []
        for seed, db, fms in zip(SEEDS, corpus, corpus_fms):
            sets = {}
            for xi in XIS:
                if (seed, xi) not in all_on_sets:
                    all_on_sets[seed, xi] = frozenset(fu_map(mine(db, MF, MiningConfig(xi), fms=fms)))
                sets[xi] = all_on_sets[seed, xi]
            for lo, hi in itertools.combinations(XIS, 2):
                if not sets[hi] <= sets[lo]:
                    bad.append((seed, lo, hi))
        assert not bad, f"containment broken at {bad[:5]}"


# ---------------------------------------------------------------------------
# large synthetic smoke run through the command line

GEN = ["--sequences", "40000", "--items", "7500", "--max-seq-len", "11", "--max-itemset", "8",
       "--max-qty", "5", "--umin", "1", "--umax", "10", "--seed", "7", "--skew", "0.8"]


def fumine(*args, timeout=None):
    t0 = time.perf_counter()
    done = subprocess.run([sys.executable, "-m", "fumine.cli", *args], capture_output=True, text=True, timeout=timeout)
    assert done.returncode == 0, done.stderr.strip() or f"exit {done.returncode}"
    return time.perf_counter() - t0


def gen_and_mine(root, tag, width):
    db, ut = root / f"{tag}.db", root / f"{tag}.ut"
    out, stats = root / f"{tag}.w{width}.out", root / f"{tag}.w{width}.stats"
    mf = root / "mfa.mf"
    if not mf.exists():
        io.write_membership(MF, mf)
    if not db.exists():
        fumine("gen", *GEN, "--db-out", str(db), "--utility-out", str(ut))
    elapsed = fumine("mine", "--db", str(db), "--utility", str(ut), "--membership", str(mf),
                     "--min-ratio", "0.02", "--parallel", str(width), "--output", str(out), "--stats", str(stats),
                     timeout=900)
    return db, ut, out, stats, elapsed


@pytest.fixture(scope="module")
def smoke_runs(tmp_path_factory):
    return tmp_path_factory.mktemp("syn40k"), {}


@pytest.mark.slow
def test_criterion_6_scalability_smoke(smoke_runs):
    root, runs = smoke_runs
    with criterion(6, "40,000-sequence synthetic database mined at xi = 0.02") as notes:
        seq = runs["seq"] = gen_and_mine(root, "a", 0)
        par = gen_and_mine(root, "a", 4)
        shape = io.describe(io.parse_database(seq[0], seq[1]))
        stats = io.parse_stats(seq[3])
        assert abs(shape.avg_length - 27) < 2 and abs(shape.items - 7500) < 200, f"shape {shape}"
        assert int(stats["candidates"]) <= DEFAULT_NODE_BUDGET, "node budget reached"
        for elapsed in (seq[4], par[4]):
            assert elapsed < 600, f"mine took {elapsed:.0f}s"
        assert seq[2].read_bytes() == par[2].read_bytes(), "parallel widths 0 and 4 disagree"
        notes.append(f"avg length {shape.avg_length:.2f}, {shape.items} items, {stats['patterns']} patterns, "
                     f"{stats['candidates']} candidates, {seq[4]:.0f}s / {par[4]:.0f}s")


@pytest.mark.slow
def test_criterion_7_determinism(smoke_runs):
    root, runs = smoke_runs
    with criterion(7, "same seed gives byte-identical database, result and stats files"):
        first = runs.get("seq") or gen_and_mine(root, "a", 0)
        second = gen_and_mine(root, "b", 0)
        for x, y in zip(first[:3], second[:3]):
            assert x.read_bytes() == y.read_bytes(), f"{x.name} and {y.name} differ"

        def stable(path):
            return [ln for ln in path.read_text().splitlines() if not ln.startswith("runtime_ms")]

        assert stable(first[3]) == stable(second[3]), "stats differ outside runtime_ms"
