"""Write square matrices over odd finite fields as diagonalizable plus square-zero."""

from .canonical import RationalForm, invariant_factors, rational_form, verify_rational_form
from .decomp import (
    Case,
    Decomposed,
    Decomposition,
    Impossible,
    Recipe,
    Unknown,
    basis_witness,
    decompose,
    decompose_block,
    verify_decomposition,
)
from .fields import FieldElement, FieldSpec, Polynomial, gf, parse_field, parse_poly
from .matrices import CompanionSpec, Matrix, companion, direct_sum, format_matrix, parse_matrix
from .obstruction import ObstructionCertificate, certify_impossible, obstructed_cubics, obstructed_family
from .oracle import SearchBudget, census, oracle_decompose

__version__ = "0.1.0"
