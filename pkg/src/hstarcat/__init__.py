"""Executable finite-dimensional unitary category theory.

Multimatrix H*-algebras, skeletal 2-Hilbert spaces, unitary multifusion
categories with spherical weights, algebra objects and their module /
bimodule categories, relative Deligne products, and the two unitary
completion operations, all with numerical certificates.
"""

__version__ = "0.1.0"
