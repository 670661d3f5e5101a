"""
Command layer: configuration, response schemas and command handlers.
"""
