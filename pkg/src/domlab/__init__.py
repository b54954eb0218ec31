"""Numerical laboratory for domination between form-generated semigroups.

The package works on finite direct sums of matrix blocks with the trace inner
product, the positive-semidefinite cone, and conjugate transposition as the
reality involution.  It provides cone arithmetic, symmetric form generators
and their semigroups, invariance criteria for closed convex sets, the family
of equivalent domination criteria, generalized ideals, instance files, and a
campaign runner with an exact commutative oracle.
"""

from .campaign import (
    ALL_CRITERIA,
    DOMINATION_CRITERIA,
    CampaignConfig,
    run_campaign,
    save_report,
    shrink_witness,
    witness_margin,
)
from .domination import (
    THM21_CRITERIA,
    THM31_CRITERIA,
    DominationInstance,
    check_domination_direct,
    check_thm21,
    check_thm31,
    check_thm41,
    commutative_matrix_domination,
    hat_tilde,
    hat_tilde_vec,
    project_C,
    project_C_vec,
    project_Cpos,
    project_Cpos_vec,
    project_Ctheta_vec,
)
from .errors import (
    CommutativityError,
    DomLabError,
    HypothesisError,
    NotPositiveError,
    NotRealError,
    ShapeMismatchError,
)
from .forms import (
    FormOperator,
    ProductForm,
    approx_form,
    default_t_grid,
    form_eval,
    positivity_check,
    semigroup_apply,
)
from .ideals import RealSubspace, Subspace, check_generalized_ideal, check_mvv_ideal, real_part_basis
from .instances import Instance, gen_instance
from .invariance import (
    ConeSet,
    ConvexSetOracle,
    DykstraSet,
    ExactSet,
    FirstFactorCone,
    ProductConeSet,
    RotatedConeConstraint,
    ThetaConstraint,
    check_invariance,
    dykstra_project,
)
from .sampling import derived_rng, gaussian_complex, gaussian_real, wishart_positive
from .spaces import (
    HVector,
    SpaceDescriptor,
    cone_margin,
    inner,
    involution_J,
    jordan,
    lattice_ops,
    project_cone,
)
from .verdicts import Verdict, Witness

__version__ = "0.1.0"
