"""
Losses, AdamW and the seeded training loop.
"""
