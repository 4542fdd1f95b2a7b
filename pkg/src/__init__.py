"""
SFC-LDPC Toolkit
================

Spatially "Mt. Fuji" coupled LDPC ensembles over the binary erasure channel.

This package provides:
- Exact ensemble profiles and (L, M) construction for a target length/rate
- Graph sampling, girth conditioning and a text graph format
- Peeling and erasure BP decoders with residual-graph traces
- Expected graph evolution and covariance evolution solvers
- Waterfall block-error prediction
- Monte-Carlo campaigns and table reproduction

Examples:
    Basic usage:
        >>> from src.ensemble import EnsembleParams, position_profile
        >>> params = EnsembleParams(dv=3, dc=6, L=12, alpha="1.11", M=260)
        >>> position_profile(params).code_length
        12734
"""

__version__ = "1.0.0"
__description__ = "SFC-LDPC ensembles: construction, decoding, evolution and waterfall prediction"

# Version info as a tuple for programmatic access
VERSION_INFO = tuple(map(int, __version__.split('.')))

from .ensemble import EnsembleParams, position_profile, solve_construction
from .utils.exceptions import SFCError
