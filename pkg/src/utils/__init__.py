"""
Utility modules for the heart-rate streaming benchmark.
"""
