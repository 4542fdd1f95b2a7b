"""
Predict Package
===============

Waterfall block-error prediction from the evolution outputs.
"""

from .waterfall import (
    q_function,
    waterfall_argument,
    waterfall_estimate,
    waterfall_curve,
    horizontal_shift,
)
from .report import PredictionReport, characterize_ensemble, default_eps_grid

__all__ = [
    'q_function',
    'waterfall_argument',
    'waterfall_estimate',
    'waterfall_curve',
    'horizontal_shift',
    'PredictionReport',
    'characterize_ensemble',
    'default_eps_grid',
]
