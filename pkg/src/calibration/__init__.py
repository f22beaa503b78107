"""
Temperature scaling and F-beta operating points.
"""
