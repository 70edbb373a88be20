"""Compatibility-graph compression into threshold bit-vector attributes,
plus type-space clearing, with brute-force oracles and instance generators."""

from .bits import BitVector, WidthMismatchError
from .graphs import (
    AttributeRepresentation,
    CompatibilityGraph,
    VerificationReport,
    all_ordered_pairs,
    build_graph_from_attributes,
    threshold_feasible,
    verify_representation,
)
from .typespace import (
    TypePartitionError,
    TypeSpace,
    extract_type_space,
    extract_type_space_with_altruists,
    graph_from_type_space,
)
from .fileio import (
    ParseError,
    read_attributes,
    read_edge_list,
    write_attributes,
    write_edge_list,
)
from .satsolver import SAT, TIMEOUT, UNSAT, CdclSolver, SolverStats, solve_cnf
from .represent import (
    CnfEncoding,
    EnumerationResult,
    MinKResult,
    MinViolationsResult,
    RepresentationProblem,
    SolveOutcome,
    SoundnessError,
    constructive_representation,
    encode_k0,
    encode_kt,
    enumerate_solutions,
    lift_representation,
    min_k,
    min_violations,
    solve,
    theorem_width_bound,
    zero_pad,
)
from .clearing import (
    COST_TOLERANCE,
    CycleCover,
    FlipClearResult,
    FlipCostMatrix,
    FlipPlan,
    MultiplicityVector,
    TypeWalk,
    TypeWalkSet,
    clear_by_types,
    enumerate_type_walks,
    flip_and_clear,
    model_altruists,
    realize_cover,
)
from .forge import (
    GeneratorConfig,
    Gadget,
    ReductionInstance,
    ThreeSatFormula,
    decode_assignment,
    gen_attribute_pool,
    gen_blood_pool,
    gen_gadget,
    gen_theorem4_graph,
    random_3sat,
    read_dimacs_3sat,
    reduce_3sat,
)
from .oracle import (
    SizeGuardError,
    enumerate_cycles,
    exhaustive_representation,
    max_cycle_cover_bruteforce,
    sat_bruteforce,
)

__version__ = "0.1.0"
