"""Scattering theory for continuous-time quantum walks on graphs with tails."""

from .bound import BoundState, bound_spectrum, find_bound_states, find_first_kind, find_second_kind
from .graph import (
    GraphFormatError,
    TailedGraph,
    TailLabel,
    build_hamiltonian,
    build_tail_operators,
    load_graph,
    parse_graph,
    serialize_graph,
    validate,
)
from .numeric import ToleranceConfig
from .scattering import (
    EdgeMomentumError,
    Momentum,
    PropagatingState,
    SMatrix,
    assemble_A,
    check_time_reversal,
    check_unitarity,
    edge_states,
    kernel_projector,
    probability_current,
    propagating_state,
    propagating_states,
    s_matrix,
)
from .surgery import (
    attach_tail,
    compose_gates,
    connect_tails,
    cut_tail,
    cut_tail_stump,
    cut_tails_block,
    direct_sum,
    unitary_update,
)

__version__ = "0.1.0"
