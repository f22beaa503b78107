"""
Benchmark configuration: section schemas and the loader.
"""
