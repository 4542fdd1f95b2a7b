"""
Ensemble Package
================

Exact closed-form quantities of a (d_v, d_c, L, alpha) SFC-LDPC ensemble.

Key Components:
- EnsembleParams: validated ensemble description with exact rational alpha
- position_profile: node counts, remainder degrees, code length, design rate
- connection_law: s(i), rho, rho' and post-channel degree distributions
- solve_construction: choose (L, M) for a target length and rate
- reference: named ensembles used in the published experiments
"""

from .params import EnsembleParams, parse_alpha
from .profile import PositionProfile, position_profile, section_size
from .law import ConnectionLaw, connection_law, binomial_matrix
from .construction import ConstructionCandidate, solve_construction, iter_candidates
from .reference import REFERENCE_ENSEMBLES, reference_ensemble

__all__ = [
    'EnsembleParams',
    'parse_alpha',
    'PositionProfile',
    'position_profile',
    'section_size',
    'ConnectionLaw',
    'connection_law',
    'binomial_matrix',
    'ConstructionCandidate',
    'solve_construction',
    'iter_candidates',
    'REFERENCE_ENSEMBLES',
    'reference_ensemble',
]
