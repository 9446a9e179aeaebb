"""Exact symbolic engine for support conditions on simplicial families of
subschemes and the moving constructions that improve them."""

__version__ = "0.1.0"

from .polyring import (  # noqa: F401
    AMBIENT_AFFINE,
    AMBIENT_PROJECTIVE,
    AUXILIARY,
    FIBER,
    HOMOTOPY,
    SIMPLEX,
    Polynomial,
    PolyParseError,
    PolyRing,
    PrimeField,
    Rationals,
    RingMismatchError,
    SubstitutionMap,
    VariableBlock,
    apply_substitution,
    dehomogenize_block,
    homogenize_block,
    leading_form,
    parse_poly,
)
from .idealkit import (  # noqa: F401
    Budget,
    BudgetExceededError,
    IdealPresentation,
    MonomialOrder,
    block_degree_order,
    eliminate_block,
    elimination_order,
    grevlex_order,
    groebner_basis,
    ideal_dimension,
    ideal_equal,
    lex_order,
    normal_form,
    projective_closure,
    radical_membership,
    saturate,
)
from .simplicial import (  # noqa: F401
    FaceSelector,
    SimplicialContext,
    all_faces,
    ambient_closure,
    chart_restrict,
    face_restrict,
    make_context,
    simplicial_pullback,
)
from .supports import (  # noqa: F401
    CERTIFIED,
    REFUTED,
    UNKNOWN,
    ClassifyOptions,
    Support,
    check_proper_intersections,
    classify_support,
    fiber_dim_strata,
    fiber_dimension_at,
    full_fiber_locus,
    is_induced,
    quasi_finite_locus,
    scheme_image,
    tower_position,
)
from .mover import (  # noqa: F401
    Homotopy,
    InputNotCertified,
    MoveCertificate,
    MoveOptions,
    PseudoEndo,
    RetryBudgetExhausted,
    build_homotopy,
    build_pseudo_endo,
    extend_from_divisor,
    f_j_embedding,
    lower_by_hyperplane,
    move_affine_support,
    pullback_family,
    vertex_move,
)
