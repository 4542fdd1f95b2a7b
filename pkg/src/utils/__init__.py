"""
Utilities Package
=================

Common utility functions and classes used throughout the project.

Modules:
- exceptions.py: Exception hierarchy rooted at SFCError
- config.py: YAML/JSON configuration loading into pydantic models
"""

from .exceptions import (
    SFCError,
    ValidationError,
    ConfigurationError,
    CapacityError,
    InfeasibleTargetError,
    ConditioningError,
    GraphFormatError,
    SolverError,
    NoLocalMinimumError,
    BracketError,
    MissingArtifactError,
    ToleranceFailure,
)

__all__ = [
    'SFCError',
    'ValidationError',
    'ConfigurationError',
    'CapacityError',
    'InfeasibleTargetError',
    'ConditioningError',
    'GraphFormatError',
    'SolverError',
    'NoLocalMinimumError',
    'BracketError',
    'MissingArtifactError',
    'ToleranceFailure',
]
