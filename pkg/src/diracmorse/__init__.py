"""Dirac equation with the exponential (Morse-type) potential V(x) = -A exp(-omega x).

Closed-form bound states, a tridiagonal Laguerre-basis representation whose
three-term recursion is solved by continuous dual Hahn polynomials, and an
independent ODE shooting oracle that checks both.
"""

from .model import ModelParams
from .bound import BoundState, spectrum, valid_states
from .scatter import solve, wavefunction

__all__ = ["ModelParams", "BoundState", "spectrum", "valid_states", "solve", "wavefunction"]
__version__ = "0.1.0"
