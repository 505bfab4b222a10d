"""Levi forms, q-convexity and Kohn multiplier ideals for polynomial boundaries in C^n."""

from .errors import BudgetError, GroebnerBudgetError, InputError, LeviKohnError
from .expr import parse_expression
from .gaussian import GaussianRational
from .groebner import groebner_basis, radical_membership
from .kohn import init_chain, minors, run_chain, step_chain, verify_certificate
from .levi import (
    DefiningFunction,
    HermitianMetric,
    classify_point,
    complex_hessian,
    frame_trace_det,
    gradient_form,
    graph_frame,
    levi_matrix_on_frame,
    q_margin,
    sample_boundary,
)
from .poly import HermitianPolynomial, arith, conjugate, evaluate, is_real, wirtinger_d
from .variety import (
    HoloMap,
    PolyVectorField,
    VarietyIdeal,
    bracket_flag,
    complex_tangential_check,
    holomorphic_dimension,
    involutivity_check,
    levi_kernel_at,
    lie_bracket,
    tangency_order,
    tangent_spaces_at,
)

__version__ = "0.1.0"
