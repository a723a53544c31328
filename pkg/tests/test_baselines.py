import pytest

from _util import MF, pat
from fumine import fuzzy
from fumine.baselines import (
    ComparisonReport,
    OracleConfig,
    all_pattern_utilities,
    brute_force_mine,
    compare_results,
    pfus_like_mine,
)
from fumine.miner import MiningConfig, MiningResult, mine
from fumine.model import ConfigError, NodeBudgetExceeded, QDatabase


def test_brute_extremes(db):
    assert brute_force_mine(db, MF, 0.99, max_length=3).patterns == []
    assert brute_force_mine(QDatabase((), db.utility_table), MF, 0.1).patterns == []


@pytest.mark.parametrize("xi", [0.1, 0.12, 0.124, 0.125, 0.2])
def test_brute_contains_a_middle_e_middle_iff_threshold(db, xi):
    got = pat("a:Middle", "e:Middle") in brute_force_mine(db, MF, xi).pattern_set()
    assert got == (21.2 >= 171 * xi - 1e-9)


def test_brute_utilities_match_engine(small_corpus):
    for d in small_corpus[:6]:
        table = all_pattern_utilities(d, MF)
        for fs, v in table.items():
            assert v == pytest.approx(fuzzy.fu_in_database(fs, d, MF), abs=1e-9)


def test_brute_max_length_caps_enumeration(db):
    short = brute_force_mine(db, MF, 0.01, max_length=2)
    assert max(sum(map(len, fs)) for fs, _ in short.patterns) == 2
    full = brute_force_mine(db, MF, 0.01)
    assert short.pattern_set() <= full.pattern_set()


def test_brute_budget(db):
    with pytest.raises(NodeBudgetExceeded):
        brute_force_mine(db, MF, 0.1, node_budget=10)


def test_oracle_config():
    with pytest.raises(ConfigError):
        OracleConfig(0.1, max_length=0)
    with pytest.raises(ConfigError):
        OracleConfig(2.0)


def test_pfus_matches_brute_and_costs_more(db):
    p = pfus_like_mine(db, MF, 0.10)
    b = brute_force_mine(db, MF, 0.10)
    m = mine(db, MF, MiningConfig(0.10))
    assert compare_results(p, b).match
    assert p.stats.candidates >= m.stats.candidates


def test_pfus_empty_database(db):
    assert pfus_like_mine(QDatabase((), db.utility_table), MF, 0.1).patterns == []


def test_pfus_on_corpus(small_corpus):
    for d in small_corpus:
        for xi in (0.02, 0.2):
            assert compare_results(pfus_like_mine(d, MF, xi), brute_force_mine(d, MF, xi)).match


def _result(pairs):
    return MiningResult(list(pairs), labels=MF.labels)


def test_compare_results_cases():
    x, y = pat("a:Low"), pat("b:Low")
    same = compare_results(_result([(x, 1.0)]), _result([(x, 1.0)]))
    assert same.match and same.max_delta == 0 and same.symmetric_difference == []
    assert str(same).startswith("MATCH")
    diff = compare_results(_result([(x, 1.0), (y, 2.0)]), _result([(x, 1.0)]))
    assert len(diff.symmetric_difference) == 1 and diff.only_a == [y]
    assert str(diff).startswith("MISMATCH")
    close = compare_results(_result([(x, 1.0)]), _result([(x, 1.0 + 1e-12)]), tol=1e-9)
    assert close.match
    far = compare_results(_result([(x, 1.0)]), _result([(x, 1.1)]))
    assert not far.match and far.max_delta == pytest.approx(0.1)
    assert isinstance(far, ComparisonReport)
