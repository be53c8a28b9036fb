"""Exact local algebra for images of manifolds under finite holomorphic map germs."""

from .ring import I, ONE, ZERO, DEGREVLEX, LEX, NEGDEGREVLEX, MonomialOrder, Poly, Ring, Scalar, TruncatedSeries
from .ideals import (
    INFINITE,
    GermStatus,
    GermVerdict,
    IdealHandle,
    Inconclusive,
    Smooth,
    contains,
    eliminate,
    germ_set_equal,
    is_smooth_germ,
    local_quotient_dim,
    radical_membership,
    standard_basis,
)
from .germmap import (
    HypothesisFailure,
    MapGerm,
    image_ideal,
    jaccond_check,
    multiplicity,
    normal_form_along_X,
    preimage_closure_equals,
)
from .curve import curve_image_decision, find_separating_function, roots_of_unity_coeff, sym_express
from .crgeom import RealSubmanifold, condition_ii_check, cr_profile, theorem11_report
from .cli import parse_session, run_session

__version__ = "0.1.0"
