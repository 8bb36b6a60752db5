"""Numerical toolkit for free super field theories over Grassmann superpoints."""

from .errors import (DimensionError, GridError, InvalidMorphismError, PreconditionError,
                     SingularError, SupportError, SuperQFTError, UnsupportedError)
from .grassmann import GrassmannElement, GrassmannMorphism, gr_mul, gr_pullback, gr_star
from .superlinalg import SuperMatrix, berezinian, smat_exchange, smat_inverse, smat_mul

__version__ = "0.1.0"
