"""
Evaluation metrics, grouped bootstrap intervals and report files.
"""
