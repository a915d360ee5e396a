"""Retracts, verbal closures and supporting machinery for subgroups of free groups."""

__version__ = "0.1.0"

from .words import Word, Substitution, apply, commutator, conjugate, invert, multiply, primitive_root, reduce
from .stallings import SubgroupGraph, basis_of, contains, enumerate_elements, fold, fringe, includes, intersect
from .abelian import abelian_retract_obstruction, exponent_vector, is_primitive, smith_normal_form
from .equations import (
    CoefficientSystem,
    check_ctest_property,
    conjugator_of_tuples,
    find_discriminating_retraction,
    solve_in_subgroup,
    solve_verbal,
)
from .closure import (
    RetractVerdict,
    intersect_retracts_check,
    is_retract,
    is_verbally_closed,
    vcl,
    verify_retraction,
)
from .nilpotent import (
    HallBasis,
    NilElement,
    collect,
    commutator_width_bounded,
    hall_basis,
    nil_commutator,
    nil_invert,
    nil_multiply,
    verify_commutator_form,
)
