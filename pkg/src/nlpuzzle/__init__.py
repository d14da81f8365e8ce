"""Solve knights-and-knaves puzzles stated in English.

The pipeline tokenizes the text, finds the persons, rewrites pronouns,
parses every sentence with a feature grammar into first-order logic, adds
background knowledge, and hands the theory to a model finder and a
resolution prover.
"""

__version__ = "0.1.0"
