"""
Decoder Package
===============

BEC channel sampling, the peeling decoder with residual-graph traces and an
erasure BP decoder.
"""

from .channel import ErasurePattern, sample_erasures, channel_generator
from .peeling import Outcome, DecodeTrace, PeelingDecoder, peel, stopping_set
from .bp import BPResult, bp_decode, bp_residual

__all__ = [
    'ErasurePattern',
    'sample_erasures',
    'channel_generator',
    'Outcome',
    'DecodeTrace',
    'PeelingDecoder',
    'peel',
    'stopping_set',
    'BPResult',
    'bp_decode',
    'bp_residual',
]
