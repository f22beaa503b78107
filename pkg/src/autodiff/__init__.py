"""
Minimal reverse-mode differentiation over numpy arrays.
"""
