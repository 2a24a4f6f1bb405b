"""Desk-scale arithmetic of twisted hyperbolic counting.

Subpackage map:

- ``arith``       exact scalars: roots of unity, Eisenstein integers, surds, residue symbols
- ``geodesics``   class enumeration over the modular group via forms and Pell automorphs
- ``multipliers`` factor systems, theta multiplier, Petersson scalars, Kubota character
- ``kloosterman`` generalized Kloosterman sums and Eisenstein coefficient partial sums
- ``counting``    twisted Chebyshev-style counting functions and error diagnostics
- ``zeta``        truncated Selberg/Ruelle products
- ``spectral``    eigenvalue datasets, Shimura parameter maps, exponent calculus
"""

__version__ = "0.1.0"
