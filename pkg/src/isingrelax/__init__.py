"""Cooperative relaxation of Ising-coupled two-level atoms.

Exact Lindblad dynamics for small chains, mean-field Bloch dynamics for large
ones, dipole-dipole geometry coefficients, and the exactly solvable two-atom
cavity block, with a reproducible CSV-emitting CLI.
"""

__version__ = "0.1.0"
