"""
GRU-D and Transformer encoders, task heads and non-learned baselines.
"""
