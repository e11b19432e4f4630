"""Exact-arithmetic toolkit for pro-p Iwahori generators of split reductive
groups: root data, Chevalley collection, finite-level verification, Frattini
character modules, and the Galois character criterion."""

from .rootdata import (
    Root,
    RootSystem,
    RootDatum,
    CocharacterSet,
    build_root_system,
    product_root_system,
    build_root_datum,
    pro_p_cochar_basis,
    root_chain,
    smith_normal_form,
)
from .chevalley import (
    StructureConstants,
    CommutatorExpansion,
    UnipotentWord,
    HeightFiltration,
    structure_constants,
    commutator_expansion,
    collect_product,
    unipotent_filtration,
)
from .reps import (
    ModMatrix,
    NaturalSLRep,
    AdjointRep,
    natural_sl_generators,
    adjoint_generators,
    reduce_and_classify,
    ldu_factor,
)
from .generators import (
    GenDesc,
    GeneratorSpec,
    FrattiniModule,
    minimal_generators,
    frattini_module,
    is_multiplicity_free,
)
from .verify import (
    FiniteMatrixGroup,
    VerificationReport,
    bfs_closure,
    frattini_rank,
    verify_generation,
    verify_g2_span,
    verify_torus_identity,
)
from .galois import (
    CharacterPool,
    CharacterAssignment,
    CriterionReport,
    character_pool,
    constructive_assignment,
    search_assignment,
    threshold_constant,
    is_regular_prime,
    evaluate_criterion,
)
from .errors import RejectionError, ResourceLimitError

__all__ = [n for n in dir() if not n.startswith("_")]
