"""Numerical realization of the dynamical elliptic operator algebra.

Machine-checks, at generic points of the universal cover, the identities a
two-variable elliptic operator calculus must satisfy: Weyl-group relations
of the two-term theta operators, residue membership conditions, the
dual-side homomorphism onto operator products, coproduct compatibility on
sections, and the inverse identities tying operators to their mirrors for
the dual root datum.
"""

from .expr import (
    Const,
    EvalPoint,
    GuardRejectionError,
    HigherOrderPoleError,
    LinearForm,
    MeroExpr,
    Neg,
    NearDivisorError,
    Prod,
    Quot,
    RegularityResult,
    Sum,
    ThetaOf,
    denominator_forms,
    evaluate,
    h_linear,
    is_regular_along,
    lam_linear,
    proportional,
    residue_along,
    sample_generic_point,
    slice_point,
    theta_forms,
    transform_point,
    twist,
    z_linear,
)
from .hecke import (
    HeckeElement,
    IdentityReport,
    NonReducedWordError,
    ResidueCheck,
    ResidueReport,
    act_on_section,
    add,
    canonical_failing_element,
    coefficient_residual,
    dl_dual_langlands,
    dl_dynamical,
    gamma,
    gkv_dual_generator,
    identity_element,
    multiply,
    psi_act,
    reduced_words_of,
    sample_points,
    scale,
    t_w,
    verify_adjunction_identity,
    verify_braid,
    verify_pole_cancellation,
    verify_psi_compat,
    verify_quadratic,
    verify_residue_conditions,
    verify_word_independence,
    zero_element,
)
from .roots import (
    RootDatum,
    WeylElement,
    WeylGroup,
    braid_order,
    build_root_datum,
    enumerate_weyl,
    inversion_set,
    langlands_dual,
    positive_root_pairs,
    positive_roots,
    rho_vectors,
    weyl_group,
)
from .theta import ThetaParams, ThetaRangeError, theta, theta_derivative_at_zero
from .cli import RunConfig, SuiteReport, list_identities, run

__version__ = "0.1.0"
