"""Exact computer algebra for N-graded charts.

Single-chart engine over the rationals: coalgebra bundles with their
coherence constraints and admissibility, the geometrization to chart
algebras, graded vector fields and brackets, involutive distributions,
and constructive Frobenius normal forms.
"""

from .coalgebra import (
    CoalgebraBundle,
    CoalgebraMorphism,
    check_admissible,
    check_coalgebra,
    compute_K,
    dvb_coalgebra,
    morphism_check,
    split_coalgebra,
    split_from_gens,
    splitting_iso,
    truncate,
    wedge_coalgebra,
)
from .distrib import (
    Distribution,
    FrobeniusChart,
    frobenius_normal_form,
    graded_antiderivative,
    is_involutive,
    make_distribution,
    membership,
    restrict_distribution,
    single_field_normal_form,
)
from .exactnum import Poly, PolyMatrix, Rat, kernel_basis, rank_at, rank_generic
from .fields import (
    ChartMap,
    CompatDerivation,
    VectorField,
    bracket,
    compat_check,
    is_homological,
    linearly_independent,
    restrict_truncation,
    tangent_at,
    to_compat_derivation,
    transform_field,
)
from .geometrize import (
    ChartAlgebra,
    coalgebra_of,
    functor_on_morphism,
    geometrize,
    reduce_product,
    roundtrip,
)
from .gradedring import GradedFunction, GradedSignature, monomials_of_degree, normalize

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
