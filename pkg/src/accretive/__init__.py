"""
Accretive evolution toolkit

Numerical companion for abstract evolution problems u' + A u = F(t, u) with
an m-accretive operator A: resolvents, the contraction semigroup, the
implicit Euler scheme and its Duhamel decomposition, Picard iteration with
scalar majorants, and the uniqueness criteria for non-Lipschitz kernels.
"""

from .banach import NormKind, StateVector, TimeGrid, Trajectory, bielecki_norm, norm, sup_time_norm
from .coalbedo import CoAlbedo, coalbedo_eval, coalbedo_modulus_check
from .config import SolverDefaults
from .criteria import (
    CombinedCriterionSpec,
    OsgoodVerdict,
    combined_criterion_check,
    criterion_matrix,
    dini_check,
    nagumo_check,
    osgood_classify,
    subadditivity_check,
)
from .errors import AccretiveError
from .evolution import (
    ForcingTerm,
    compare_euler_duhamel,
    discrete_duhamel_decompose,
    implicit_euler,
    mild_duhamel,
)
from .majorant import (
    Gauge,
    PhiFunction,
    PsiTransform,
    ScalarCurve,
    ThetaFunction,
    gronwall_bound,
    horizon,
    power_solution,
    solve_scalar_ie,
    solve_via_psi,
    uniqueness_majorant,
)
from .operators import (
    AbsSubdifferential,
    LinearMatrix,
    LinearScalar,
    ResolventSolverConfig,
    WeightedPLaplace1D,
    ZeroOperator,
    apply_single_valued,
    is_accretive_sample,
    resolvent,
)
from .picard import (
    Affine,
    PointwiseScalar,
    SeparableModulus,
    SweepScheme,
    TimeModulated,
    apply_G,
    bielecki_factor,
    majorant_domination,
    picard_iterate,
    two_solution_gap,
)
from .semigroup import SemigroupEvaluator, exponential_formula, semigroup

__version__ = "1.0.0"

__all__ = [
    'NormKind', 'StateVector', 'TimeGrid', 'Trajectory', 'norm', 'sup_time_norm', 'bielecki_norm',
    'ZeroOperator', 'LinearScalar', 'LinearMatrix', 'AbsSubdifferential', 'WeightedPLaplace1D',
    'ResolventSolverConfig', 'resolvent', 'apply_single_valued', 'is_accretive_sample',
    'SemigroupEvaluator', 'exponential_formula', 'semigroup',
    'ForcingTerm', 'implicit_euler', 'discrete_duhamel_decompose', 'mild_duhamel', 'compare_euler_duhamel',
    'Affine', 'PointwiseScalar', 'TimeModulated', 'SeparableModulus', 'SweepScheme',
    'apply_G', 'picard_iterate', 'bielecki_factor', 'majorant_domination', 'two_solution_gap',
    'ThetaFunction', 'PhiFunction', 'ScalarCurve', 'PsiTransform', 'Gauge',
    'solve_scalar_ie', 'solve_via_psi', 'horizon', 'gronwall_bound', 'power_solution', 'uniqueness_majorant',
    'OsgoodVerdict', 'osgood_classify', 'nagumo_check', 'dini_check', 'subadditivity_check',
    'CombinedCriterionSpec', 'combined_criterion_check', 'criterion_matrix',
    'CoAlbedo', 'coalbedo_eval', 'coalbedo_modulus_check',
    'SolverDefaults', 'AccretiveError',
]
