"""Optimal message rates for distributed function computation.

A library and CLI that, for a finite function table and a joint source
distribution, computes the optimal one-way message rate: via partitions
induced by the function family when the source has full support, and via
maximal solvable hyperedges and conditional hypergraph entropy when the
support is restricted.  Exhaustive finite verifiers back every definition
the rate formulas rest on.
"""

__version__ = "0.1.0"

from .model import (
    BudgetError,
    FunctionTable,
    Hypergraph,
    Instance,
    InstanceError,
    JointDistribution,
    Partition,
    SequencePair,
    TestChannel,
    TypeVector,
    instance_digest,
    load_instance,
    parse_instance,
    serialize_instance,
    validate_full_support,
)
from .partitions import (
    FunctionFamily,
    InformativenessReport,
    check_informative,
    finest_condition1_partition,
    hat_modsum_function,
    hat_type_function,
    induced_partition,
    induced_partition_symbolwise,
)
from .typecalc import (
    AmbiguityError,
    ConsistentListSet,
    InfeasibleError,
    JointType,
    ListOfTypes,
    LoopMove,
    apply_loop_move,
    consistent_lists,
    decode_type_from_quantization,
    enumerate_joint_types,
    eval_symbolwise,
    loop_cancellation_transport,
    modsum_function,
    reconstruct_representative,
    substitute,
    type_from_marginals,
    type_function,
    type_of,
)
from .solvability import (
    BalanceProfile,
    SimpleLoop,
    balance_profile,
    compatible_hyperedge,
    enumerate_simple_loops,
    is_solvable,
    maximal_solvable_hyperedges,
    verify_compatible_membership,
    verify_compatible_solvable,
)
from .entropy import (
    EntropyResult,
    RateReport,
    conditional_entropy,
    conditional_hypergraph_entropy,
    grid_oracle_conditional,
    hypergraph_entropy,
    optimal_rate_full_support,
    optimal_rate_restricted_support,
    relaxed_hypergraph_entropy,
)
