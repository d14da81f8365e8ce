"""Model finding and resolution proving."""

from .models import (
    AMBIGUOUS,
    Consensus,
    GroundTheory,
    Interpretation,
    UnsupportedTheory,
    consensus_assignment,
    consensus_cells,
    default_constant_map,
    evaluate,
    find_models,
    ground,
    solve_ground,
)
from .prover import (
    PROVED,
    RESOURCE,
    SATURATED,
    Proof,
    ProofResult,
    ProofStep,
    check_proof,
    compress_hyper,
    factors,
    prove,
    resolvents,
    subsumes,
    variant,
)
