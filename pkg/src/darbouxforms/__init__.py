"""Exact polynomial differential forms, singular Darboux normal forms for
degree-one closed 2-forms, and the classification of degree-one
codimension-one distributions on projective space."""

from .errors import AlgorithmFailure, FormsError, InvalidInput
from .exterior import (
    DifferentialForm,
    LinearChange,
    VectorField,
    class_of_two_form,
    darboux_basis_at,
    euler_primitive,
    exterior_derivative,
    form_degree,
    interior_product,
    pullback_linear,
    radial_field,
    wedge,
    wedge_power,
)
from .polyring import Polynomial, gcd_many
from .textio import parse_form, print_form

__version__ = "0.1.0"

__all__ = [
    "AlgorithmFailure",
    "DifferentialForm",
    "FormsError",
    "InvalidInput",
    "LinearChange",
    "Polynomial",
    "VectorField",
    "class_of_two_form",
    "darboux_basis_at",
    "euler_primitive",
    "exterior_derivative",
    "form_degree",
    "gcd_many",
    "interior_product",
    "parse_form",
    "print_form",
    "pullback_linear",
    "radial_field",
    "wedge",
    "wedge_power",
]
