"""Lattices of order-convex subsets: identities, variety membership,
embeddings into tree-like hosts, and the three-set growth experiment.

The public surface re-exported here is what the command line is built
on; everything accepts and returns plain data plus the small report
dataclasses defined in the submodules.
"""

from .errors import (
    BadArity,
    BudgetExceeded,
    CapExceeded,
    ConvexicaError,
    CycleDetected,
    EmptyPoset,
    InvalidReconstruction,
    NoPartition,
    NotAHomomorphism,
    NotALattice,
    NotDClosed,
    NotInSub2,
    ParseError,
    PartitionMissing,
    TooFewGenerators,
    TooLarge,
    UnboundVariable,
    UnknownLabel,
    ZeroSize,
)
from .poset import (
    Poset,
    antichain,
    chain,
    convex_closure,
    d_closed_sets,
    d_closure_mask,
    hull_mask,
    is_convex,
    is_d_closed_mask,
    is_tree_like,
    length,
    pij,
    poset_from_covers,
)
from .colattice import (
    CoLattice,
    classify_p2,
    co_cardinality_pij,
    co_lattice,
    is_completely_si,
    quotient,
    subdirect_decomposition,
)
from .lattice import (
    FinLattice,
    Presentation,
    d_cycles,
    d_minimal,
    d_relation,
    from_colattice,
    from_leq_matrix,
    from_leq_pairs,
    from_presentation,
    generated_sublattice,
    is_join_seed,
    is_subdirectly_irreducible,
    join_covers,
    join_irreducibles,
)
from .terms import (
    Identity,
    Verdict,
    check_identity,
    check_ji_interpretation,
    eval_term,
    find_bi_stirlitz,
    find_stirlitz_tracks,
    height_polynomials,
    identity_by_name,
    udav_bond_partition,
    verify_bi_stirlitz,
    verify_stirlitz_track,
)
from .variety import (
    GammaEmbedding,
    MembershipReport,
    decide_sub,
    decide_sub2,
    decide_subn,
    gamma_embedding,
    revalidate,
    sub2_canonical_form,
    truncate_hom,
)
from .formats import (
    format_colattice,
    format_lattice,
    format_poset,
    format_reconstruction,
    parse_identity,
    parse_input,
    parse_lattice,
    parse_poset,
    parse_presentation,
    parse_reconstruction,
)
from .growth import (
    GrowthReport,
    TruncatedFigure2,
    build_truncated_figure2,
    restrict_truncation,
    run_growth_experiment,
    run_truncation,
    truncation_from_poset,
    validate_truncation,
)
from .corpus import ENTRIES, CorpusEntry, CorpusResult, run_corpus

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
