"""
Sampler Package
===============

Random Tanner graphs of SFC-LDPC ensembles.

Key Components:
- TannerGraph: immutable, array-backed sampled graph
- sample_graph: construction steps 1-4 plus dummy shortening
- condition_girth: same-position edge swaps removing short cycles
- serialize_graph / parse_graph: canonical text format, plus alist export
"""

from .graph import TannerGraph
from .sampling import sample_graph, spawn_seeds, position_generators
from .girth import GirthConditioner, condition_girth, find_short_cycles, girth, shortest_cycle_through
from .graph_io import serialize_graph, parse_graph, save_graph, load_graph, write_alist

__all__ = [
    'TannerGraph',
    'sample_graph',
    'spawn_seeds',
    'position_generators',
    'GirthConditioner',
    'condition_girth',
    'find_short_cycles',
    'girth',
    'shortest_cycle_through',
    'serialize_graph',
    'parse_graph',
    'save_graph',
    'load_graph',
    'write_alist',
]
