"""
Benchmark pipeline steps and the step runner.
"""
