"""
Parsing, rendering and syntactic transformations of carddl documents.
"""
