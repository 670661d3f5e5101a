"""
Decision procedures and model constructions.
"""
