"""
Harness Package
===============

Monte-Carlo waterfall campaigns, table reproduction and plot-data emission.
"""

from .statistics import CellStats, wilson_interval, rule_of_three
from .rank import gf2_rank, rank_rate
from .campaign import CellResult, ResultTable, run_code, run_waterfall, unit_seed
from .tables import (
    Cell,
    TableReport,
    TableReproducer,
    TableRegistry,
    get_table_registry,
    register_table,
    reproduce_tables,
)
from .plotdata import emit_plot_data, evolution_filename, write_evolution_csv
from .compare import Comparison, compare_sc_sfc

__all__ = [
    'CellStats',
    'wilson_interval',
    'rule_of_three',
    'gf2_rank',
    'rank_rate',
    'CellResult',
    'ResultTable',
    'run_code',
    'run_waterfall',
    'unit_seed',
    'Cell',
    'TableReport',
    'TableReproducer',
    'TableRegistry',
    'get_table_registry',
    'register_table',
    'reproduce_tables',
    'emit_plot_data',
    'evolution_filename',
    'write_evolution_csv',
    'Comparison',
    'compare_sc_sfc',
]
