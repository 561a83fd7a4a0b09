"""Exact engine for state-field correspondences, field algebras and vertex algebras."""

from .elements import (
    GeneratorSet,
    LambdaPoly,
    ModuleElement,
    PolyME,
    Q,
    binom,
    lambda_integrate,
    lambda_substitute,
    rat,
)
from .report import CheckReport, Report, ENGINE_VERSION
