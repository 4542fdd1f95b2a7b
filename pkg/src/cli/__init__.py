"""
CLI Package
===========

Command-line interface of the SFC-LDPC toolkit (click group ``sfc``).
"""
