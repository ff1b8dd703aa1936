"""Exact continuous valuations on finite T0 spaces and their projective
limits: spaces as finite posets, weights as extended non-negative
rationals, every law checked rather than assumed.
"""

from .errors import BadDocument, SizeLimit, ValimError
from .extreal import INF, ONE, ZERO, ExtRat, inf_of, sup_of, way_below
from .order import (
    DEFAULT_MAX_OPENS,
    DEFAULT_MAX_POINTS,
    EpPair,
    FiniteSpace,
    MonotoneMap,
    NotAPoset,
    NotEpPair,
    NotMonotone,
    UpSet,
    check_space,
    compose,
    closure,
    enumerate_opens,
    identity_map,
    interior,
    lift,
    product_space,
    sobriety_witness,
    space_from_covers,
    subspace,
    upward_closure,
)
from .valuation import (
    AxiomViolation,
    LocalFinitenessReport,
    NotSimple,
    NotSupported,
    Restriction,
    TabulatedSetFunction,
    TightnessReport,
    Valuation,
    check_valuation,
    decompose_simple,
    first_differing_open,
    image_valuation,
    is_locally_finite,
    is_tight,
    mu_circ,
    nu_bullet,
    point_mass,
    restrict_to_open,
    support_check,
    valuations_equal,
    zero_valuation,
)
from .projective import (
    BondLawViolation,
    CompactFamily,
    CylinderOpen,
    EpLawViolation,
    EpSystem,
    EventualImage,
    Incompatible,
    InconclusiveAtDepth,
    LazyChain,
    LimitSpace,
    NotAProjection,
    NotDirected,
    PosetSystem,
    PrefixChain,
    SteenrodResult,
    ValuedSystem,
    check_compatibility,
    check_ep_system,
    check_system,
    cylinder_join,
    cylinder_meet,
    cylinders_equal,
    embedding_from_projection,
    eventual_images,
    find_dominating_level,
    limit_ep_structure,
    materialize_limit,
    steenrod_nonempty,
    upper_adjoint,
    verify_ep_limit_laws,
)
from .constructions import (
    DkProduct,
    LimitLawViolation,
    LimitValuation,
    LocCompCertificate,
    NotPointed,
    NotUniformlyTight,
    NoWitness,
    UniformTightnessReport,
    dk_product,
    ep_limit_valuation,
    loccomp_certificate,
    marginal_family_from_joint,
    marginals_from_joint,
    pointed_product_valuation,
    prohorov_limit,
    subset_product_system,
    uniform_tightness_check,
)
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    # errors
    "ValimError", "SizeLimit", "BadDocument", "NotAPoset", "NotMonotone",
    "NotEpPair", "AxiomViolation", "NotSimple", "NotSupported",
    "BondLawViolation", "Incompatible", "EpLawViolation", "NotAProjection",
    "NotDirected", "InconclusiveAtDepth", "LimitLawViolation", "NotPointed",
    "NotUniformlyTight", "NoWitness",
    # values
    "ExtRat", "ZERO", "ONE", "INF", "way_below", "sup_of", "inf_of",
    # spaces and maps
    "FiniteSpace", "UpSet", "MonotoneMap", "EpPair", "check_space",
    "space_from_covers", "enumerate_opens", "upward_closure", "interior",
    "closure", "sobriety_witness", "lift", "product_space", "subspace",
    "identity_map", "compose", "DEFAULT_MAX_OPENS", "DEFAULT_MAX_POINTS",
    # valuations
    "Valuation", "TabulatedSetFunction", "Restriction", "TightnessReport",
    "LocalFinitenessReport", "check_valuation", "decompose_simple",
    "point_mass", "zero_valuation", "image_valuation", "restrict_to_open",
    "first_differing_open", "valuations_equal", "support_check",
    "nu_bullet", "mu_circ", "is_tight", "is_locally_finite",
    # systems
    "PosetSystem", "PrefixChain", "LazyChain", "ValuedSystem", "LimitSpace",
    "EpSystem", "CylinderOpen", "EventualImage", "SteenrodResult",
    "CompactFamily", "check_system", "check_compatibility",
    "check_ep_system", "materialize_limit", "upper_adjoint",
    "embedding_from_projection", "limit_ep_structure",
    "verify_ep_limit_laws", "cylinder_meet", "cylinder_join",
    "cylinders_equal", "eventual_images", "steenrod_nonempty",
    "find_dominating_level",
    # constructions
    "LimitValuation", "UniformTightnessReport", "LocCompCertificate",
    "DkProduct", "ep_limit_valuation", "prohorov_limit",
    "uniform_tightness_check", "marginal_family_from_joint",
    "marginals_from_joint", "subset_product_system",
    "pointed_product_valuation", "dk_product", "loccomp_certificate",
]
