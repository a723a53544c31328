"""Mining high fuzzy-utility sequential patterns from quantitative sequence databases."""

from .baselines import (
    ComparisonReport,
    brute_force_mine,
    compare_results,
    pfus_like_mine,
)
from .datasets import random_database, running_example
from .miner import (
    MiningConfig,
    MiningResult,
    MiningStats,
    MiningTrace,
    hfsuub,
    mine,
    recursive_mining,
    sdfu,
)
from .model import (
    ConfigError,
    FItem,
    FumineError,
    MembershipFunction,
    NodeBudgetExceeded,
    QDatabase,
    QItem,
    QItemset,
    QSequence,
    UnknownItemError,
    UtilityTable,
    ValidationError,
    format_pattern,
    fsequence,
    make_database,
    reference_membership,
)
from .structures import FuzzyUtilityChain, build_fmatrix_set, build_initial_chains, project

__version__ = "0.1.0"
