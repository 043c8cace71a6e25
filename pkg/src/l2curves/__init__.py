"""Plane curves in the Lorentz-Minkowski plane from prescribed curvature.

Curvature laws kappa(rho) and kappa(v) are turned into unit-speed curves by
quadrature, checked against a catalog of closed-form families, and verified
through executable invariants.
"""
from ._version import __version__
from .catalog import (
    FamilyDescriptor,
    FamilyDomainError,
    FamilyId,
    closed_form,
    evaluate_family,
    family_info,
    pipeline_request,
    registry,
)
from .core import Branch, CurveSamples, Sign
from .expr import ExprError, KappaExpr, parse_kappa
from .quadrature import (
    Anchor,
    EmptyDomain,
    MomentumSpec,
    NonIntegrableSingularity,
    NumericFailure,
    SamplingPolicy,
    SolveRequest,
    Variable,
    momentum_from_kappa,
    solve,
)
from .verify import CheckReport, Law, compare_intrinsic

__all__ = [
    "__version__",
    "Anchor",
    "Branch",
    "CheckReport",
    "CurveSamples",
    "EmptyDomain",
    "ExprError",
    "FamilyDescriptor",
    "FamilyDomainError",
    "FamilyId",
    "KappaExpr",
    "Law",
    "MomentumSpec",
    "NonIntegrableSingularity",
    "NumericFailure",
    "SamplingPolicy",
    "Sign",
    "SolveRequest",
    "Variable",
    "closed_form",
    "compare_intrinsic",
    "evaluate_family",
    "family_info",
    "momentum_from_kappa",
    "parse_kappa",
    "pipeline_request",
    "registry",
    "solve",
]
