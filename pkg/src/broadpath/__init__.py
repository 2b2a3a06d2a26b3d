"""Broad-path cut-and-insert Hamilton path heuristic and its harness."""

from .engine import (
    BroadPath,
    BudgetExceeded,
    CutMove,
    Ledger,
    SearchOutcome,
    SearchStats,
    SolverConfig,
    StructuralError,
    compute_breaks,
    cut_and_insert,
    enumerate_moves,
    expand,
    find_h_path,
    initial_order,
    make_broad_path,
    outcome_record,
    replay_trace,
)
from .graph import (
    Graph,
    InfeasibleDegreeSequence,
    InvalidEdge,
    ParseError,
    connected,
    generate_low_degree,
    is_hamilton_path,
    load_graph,
    parse_graph,
    plant_hamiltonian,
    save_graph,
    serialize_graph,
)
from .oracle import (
    AGREE,
    SOLVER_INCOMPLETE,
    SOLVER_UNSOUND,
    NotAFailure,
    OracleAnswer,
    TooLarge,
    Unknown,
    cross_check,
    minimize_counterexample,
    oracle_has_hpath,
)
from .posa import posa_find
from .sat import (
    ClauseTooWide,
    DecodeError,
    Formula,
    ReductionMap,
    decode_assignment,
    dpll_solve,
    evaluate,
    parse_cnf,
    reduce_3sat,
    serialize_decode_map,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
