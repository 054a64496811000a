"""Exact piecewise-affine maps of the unit interval.

The central type is :class:`PAMap`, a continuous piecewise-affine map on
``[0, 1]`` stored as a canonical list of rational breakpoints.  The
submodules cover composition and membership tests (:mod:`map_core`),
orbits, periods, mixing and entropy (:mod:`dynamics`), approximation and
surgery (:mod:`construct`), factorization and equivalence classes
(:mod:`algebra`) and maps with prescribed Markov combinatorics
(:mod:`conjugacy`).
"""

from .algebra import (
    CharSeq,
    DecompositionWord,
    Factor,
    FactorKind,
    characteristic_sequence,
    class_characteristic_sequence,
    decompose,
    evolution_sequence,
    f_to_generator_word,
    recompose,
    same_equivalence_class,
)
from .conjugacy import (
    MarkovSkeleton,
    RecurrenceKind,
    SlopeMode,
    a_star,
    classify,
    construct_conjugate,
    construct_conjugate_slope1,
    default_slopes,
    index_map,
    stationary,
)
from .construct import (
    WindowSpec,
    approximate_in_G,
    approximate_increasing_in_F,
    make_leo,
    make_window,
    random_F,
    random_G,
    solve_dynamic_matching,
    target_entropy,
)
from .dynamics import (
    entropy,
    is_LEO,
    is_TM,
    j_collection,
    markov_partition,
    orbit,
    periodic_points,
)
from .errors import BudgetExceeded, DomainError, InfeasibleError, PamapsError, ParseError
from .map_core import (
    PAMap,
    compose,
    compose_all,
    count_type2,
    dump_map,
    eval_map,
    identity,
    inverse,
    is_in_F,
    is_in_G,
    is_lambda_preserving,
    iterate,
    load_map,
    reflection,
    sup_distance,
    tent,
)

__version__ = "0.1.0"
