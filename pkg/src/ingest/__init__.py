"""
R-peak ingestion: heart-rate derivation, windowing, splits and standardization.
"""
