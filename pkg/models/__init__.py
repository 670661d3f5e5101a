"""
Data models for the carddl reasoner toolkit.
"""
