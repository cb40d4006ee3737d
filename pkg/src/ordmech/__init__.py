"""ordmech: rank approximation and lex-truthfulness for ordinal mechanism design.

Exact-arithmetic implementations of ordinal market mechanisms (matching,
matroid, scheduling, general outcome sets), the per-rank approximation metric
they are judged by, and exhaustive desk-scale verifiers for strong / lex /
weak truthfulness and pseudomonotonicity.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InfeasibleError,
    OrdmechError,
    ResourceError,
    StructuralError,
    UnboundedError,
)
from .prefs import (
    IndiffProfile,
    Lottery,
    RankHistogram,
    ScoringVector,
    StrictProfile,
    check_homutil,
    expected_histogram,
    histogram,
    maxranks_general,
    rank_approx_factor,
    rank_of,
    scoring_welfare,
    welfare_from_histogram,
)
from .verify import (
    EpsilonSchedule,
    MechanismUnderTest,
    SocialChoiceFunction,
    TruthfulnessResult,
    ViolationReport,
    classify_truthfulness,
    is_pseudomonotone,
    is_top_choice_scf,
    lex_dominates,
    lt_wrapper,
    stoch_dominates,
)
from .matching import (
    Matching,
    MatchingInstance,
    FractionalMatching,
    bvn_decompose,
    gen_matching_lb,
    gen_sqrt_instance,
    max_match,
    maxrank_matching,
    maxranks_matching,
    ps,
    rsd,
    rsd_sampled,
    ttca,
)
from .matroid import (
    Allocation,
    ExplicitMatroid,
    MatroidMarket,
    PartitionMatroid,
    UniformMatroid,
    check_matint,
    matroid_intersection,
    matroid_max_match,
    maxrank_matroid,
)
from .lp import ConvexDecomposition, RationalLP, decompose, verify_tu_laminar
from .sched import (
    Schedule,
    SchedulingInstance,
    bucketize,
    gen_parallel_lb,
    makespan,
    maxrank_sched,
    parallel_det,
    parallel_rand,
    parallel_rand_lt,
    rnkcomp,
    unrelated,
)
from .general import (
    BestFactor,
    GeneralInstance,
    best_factor_lottery,
    gen_det_lb,
    gen_randrank_lb,
    plurality,
    plurality_scf,
    randrank,
)
