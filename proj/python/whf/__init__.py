"""Right Wiener-Hopf indices of rational matrix functions.

A realization is R(z) = R0 + z C (I - zA)^{-1} B + gamma (zI - alpha)^{-1} beta
with spectral radii of A and alpha below one. Matrices are complex numpy
arrays; computations run in extended precision internally.
"""

from ._whf import (
    Realization,
    WhfError,
    factor,
    generate,
    indices,
    load,
    save,
    verify,
    winding_number,
)

__all__ = [
    "Realization",
    "WhfError",
    "factor",
    "generate",
    "indices",
    "load",
    "save",
    "verify",
    "winding_number",
]
