"""Disembodiment of physical properties via pre- and post-selection.

Decide whether a set of observables can each be made to "live" in exactly
one path of a block-structured state space, synthesize explicit pre/post
selection states when possible, and verify them by weak-value evaluation
and Gaussian-pointer weak-measurement simulation.
"""

from .criterion import (
    AffineSolutionSet,
    CoefficientMatrix,
    FeasibilityVerdict,
    build_M,
    feasibility,
    solve_all_blocks,
)
from .factorize import (
    BlockStatus,
    OrthogonalSelections,
    Rank1Factor,
    SearchConfig,
    SelectionPair,
    SolveReport,
    assemble,
    find_rank1,
    gauge_fix,
    reshape_square,
    solve_problem,
)
from .linalg import (
    BlockSpace,
    BlockedState,
    covector_from_ket,
    embed_block_operator,
    inner,
    rank,
    svd_singular_values,
    tensor,
)
from .pointer import (
    ConvergenceRow,
    PointerConfig,
    PointerOutcome,
    simulate,
    simulate_joint,
    weak_limit_check,
)
from .problem import (
    Observable,
    SeparationProblem,
    TargetPattern,
    delta_target,
    validate,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    NamedScenario,
    entangled_pair,
    example_one,
    example_two,
    random_scenario,
)
from .weakvalue import (
    CalibrationMap,
    PostSelectionOrthogonal,
    WeakValueReport,
    apply_calibration,
    verify_disembodiment,
    weak_value,
)

__version__ = "0.1.0"
