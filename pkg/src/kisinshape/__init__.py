"""Exact arithmetic for torsion Kisin-module weight combinatorics and extension classes."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (BudgetError, ClassificationError, DomainError, HypothesisError, InvalidInput,
                     InvalidMove, KisinError, PrecisionError, SchemaError, ShapeError)
from .field_core import GF, INF, GlobalParams, Series, get_field, phi_twist, val_of
from .rank1 import (GLSDecomposition, GLSString, Rank1Kisin, alpha_invariant, classify_gls,
                    hom_exists, iso_as_Ginf, iso_via_alpha, weight_residue)
from .models import (CharClass, PLSComponents, PLSMove, WeightTemplate, c1_sufficient, check_C1,
                     check_C3, enumerate_models, is_model, pls_apply, pls_components, pls_moves,
                     pls_reachability)
from .shape import (AllowableMove, ShapeClass, ShapeLemmaReport, TriangularKisin, allowable_procedure,
                    classify_shape, diag_recovery_check, normalize_to_diagonal, shapelemma_verify)
from .ext import (BoundReport, ExtClass, ExtDimResult, ExtProblem, block_basis_change,
                  check_upper_bound, class_space, d_nek, equivalent, ext_dim, semilinear_solve,
                  successive_ext_assemble)
from .conditions import (CycloClass, SerreWeight, application_conditions, check_C2A, check_C2B,
                         corollary_cases, gate_report, serre_to_hodge)

__all__ = [name for name in dir() if not name.startswith("_")]
