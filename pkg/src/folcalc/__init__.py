"""Symbolic foliation calculus over Q(i)[z] and numerical-triviality diagnostics."""
from .expr import Expression, ExpressionError, eval_expression, parse_expression
from .fields import Chart, HermitianField, NonFiniteSample, diagonal_field
from .foliation import (
    ConstantMapError,
    Foliation,
    IntersectionResult,
    RationalMap,
    SingularPointError,
    VectorField,
    foliation_rank,
    induced_foliation,
    intersection_foliation,
    involutive_closure,
    is_involutive,
    lie_bracket,
    parse_vector_field,
    singular_locus,
    tangent_frame_at,
    union,
)
from .gaussian import GaussianRational, parse_gaussian
from .groebner import Budget, BudgetExceeded, use_budget
from .lab import (
    NTReport,
    NotPositiveSemidefinite,
    cauchy_schwarz_audit,
    mass_series,
    nt_integral,
    nt_report,
    nu_proxy,
    pullback_check,
    transversality_check,
)
from .modules import (
    DimensionMismatch,
    PolyIdeal,
    PolyMatrix,
    PolyModule,
    generic_rank,
    member,
    minors_ideal,
    module_equal,
    module_intersect,
    module_sum,
    saturate,
    syzygy,
)
from .poly import MultiPoly, parse_poly
from .runner import Report, emit_report, run_scene, run_task
from .scene import SceneDoc, SceneError, load_scene, parse_scene, print_scene
from .testforms import IndexPair, MalformedIndices, constant_test_form_basis, is_test_pair
from .wedge import wedge_coefficient

__version__ = "0.1.0"
