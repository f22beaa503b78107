"""
Command-line interface for the benchmark.
"""
