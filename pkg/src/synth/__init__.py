"""
Synthetic R-peak corpora for desk-scale runs.
"""
