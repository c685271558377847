"""Root-count bounds from additive complexity, with exact verification oracles."""

from .bounds import (
    SCHEMA,
    BoundError,
    BoundReport,
    Global,
    IllFormedTypeVector,
    Local,
    TowerOverflow,
    abstract_rational_bound,
    amd_global_A,
    amd_local_B,
    borodin_cook_tower,
    lenstra_global,
    lenstra_local,
    risler_real,
    roots_of_unity_bound,
    tau_trivial_bound,
    thm1_bound,
    thm1_sharpened,
    thm2_bound,
    thm3_global,
    thm3_local,
)
from .expansion import Budget, BudgetExceeded, SparsePoly, expand
from .expr import Expression, ParseError, SLPError, complexity, parse, parse_system, sigma_upper, tau_upper, to_slp
from .generate import GenConfig, generate
from .numeric import Rational, UpperReal, Valuation, floor_bound, up_eval, val_p
from .oracles import (
    DepthExceeded,
    RootCountResult,
    count_integer_roots,
    count_padic_roots,
    count_rational_roots,
    count_real_roots,
    squarefree_part,
)
from .reduction import PolySystem, ZeroPattern, build_system, enumerate_zero_patterns, lift_root
from .verify import VerifyRecord, verify_corpus, verify_expression

__version__ = "0.1.0"
