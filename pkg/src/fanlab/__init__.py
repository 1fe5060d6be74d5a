"""fanlab: a workbench for oracle register machines, layered Kripke oracles,
Kleene trees, level censuses, and uniform-bound extraction from bar realizers.
"""

from .machine import (
    Answer,
    BLOCK_ALL,
    Blocked,
    Converged,
    Decjz,
    DeciderPartial,
    FnOracle,
    Halt,
    Inc,
    Jmp,
    MapOracle,
    Oracle,
    OutOfFuel,
    Query,
    QueryTrace,
    RunResult,
    apply,
    curry,
    curry_overhead,
    decode_program,
    encode_program,
    evaluate,
    pair,
    run,
    run_decider,
    run_program,
    unpair,
)
from .kripke import (
    Family,
    GroundReal,
    LayeredOracle,
    Node,
    check_slice_access,
    flip_set,
    format_node,
    layered_answer,
    node_oracle,
    parse_node,
)
from .trees import (
    BranchDecider,
    DecidableTree,
    IncoherentBranch,
    bits_to_code,
    branch_to_decider,
    code_to_bits,
    full_scan_count,
    kleene_tree,
    kleene_witness,
    leftmost_path,
    level_census,
    level_count,
    levels,
    measure_upper,
    wwkl_witness,
)
from .fan import (
    BarRealizer,
    CoverSet,
    ExtractionExhausted,
    InvalidRealizer,
    PATH_SLICE,
    PathOracle,
    RealizerBlocked,
    RealizerOutOfFuel,
    RoutedOracle,
    UniformBound,
    apply_realizer_to_path,
    extract_bound,
    verify_uniform_bound,
)

__version__ = "0.1.0"
