"""
Evolution Package
=================

Expected graph evolution (EGE) and covariance evolution (CE) of the peeling
decoder on SFC-LDPC ensembles, the BP threshold and scaling parameter they
yield, and a Monte-Carlo oracle for both.
"""

from .state import (
    MeanState,
    CovarianceState,
    MeanTrajectory,
    CovTrajectory,
    coordinate,
    r1_coordinates,
)
from .initial import ege_initial, ce_initial
from .drift import drift, drift_array, jacobian, jump_covariance
from .integrate import default_step, locate_minimum, solve_ege, solve_ce
from .threshold import GammaResult, bp_threshold, gamma_coefficient, gamma_measurement
from .empirical import EmpiricalMoments, default_probes, empirical_moments

__all__ = [
    'MeanState',
    'CovarianceState',
    'MeanTrajectory',
    'CovTrajectory',
    'coordinate',
    'r1_coordinates',
    'ege_initial',
    'ce_initial',
    'drift',
    'drift_array',
    'jacobian',
    'jump_covariance',
    'default_step',
    'locate_minimum',
    'solve_ege',
    'solve_ce',
    'GammaResult',
    'bp_threshold',
    'gamma_coefficient',
    'gamma_measurement',
    'EmpiricalMoments',
    'default_probes',
    'empirical_moments',
]
