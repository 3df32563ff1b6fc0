"""Variance-based importance of components in coherent systems with dependent lifetimes."""

from .conditional import (
    DomainError,
    SystemModel,
    conditional_moments,
    error_curve,
    regression_curve,
    series_conditional_survival,
    system_conditional_survival,
)
from .copulas import FGM, Clayton, CopulaModel, Product, make_copula
from .importance import (
    ComponentImportance,
    DegenerateSampleError,
    ImportanceReport,
    error_study,
    importance_exact,
    importance_mc,
    r_squared_exact,
    r_squared_mc,
    system_moments,
)
from .marginals import Exponential, MarginalDistribution, Uniform, Weibull, make_marginal
from .specfile import SpecError, bundled_model, emit_spec, load_spec, parse_spec
from .structure import BivariateSignature, StructureError, SystemStructure, bivariate_signature

__version__ = "0.1.0"

__all__ = [
    "BivariateSignature", "Clayton", "ComponentImportance", "CopulaModel", "DegenerateSampleError",
    "DomainError", "Exponential", "FGM", "ImportanceReport", "MarginalDistribution", "Product",
    "SpecError", "StructureError", "SystemModel", "SystemStructure", "Uniform", "Weibull",
    "bivariate_signature", "bundled_model", "conditional_moments", "emit_spec", "error_curve",
    "error_study", "importance_exact", "importance_mc", "load_spec", "make_copula", "make_marginal",
    "parse_spec", "r_squared_exact", "r_squared_mc", "regression_curve", "series_conditional_survival",
    "system_conditional_survival", "system_moments",
]
