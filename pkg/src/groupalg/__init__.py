"""Weighted group algebras of finitely generated groups at desk scale."""
from .algebra import AlgebraElement, convolve, coproduct, counit, antipode, star, trace
from .ball import LengthTable, count_spheres, enumerate_ball
from .groups import Cyclic, DirectProduct, FreeAbelian, FreeGroup, Heisenberg, parse_group
from .growth import Factorial, Polynomial, SubExponential, SubFactorial, parse_growth
from .logvalue import LogValue

__version__ = "0.1.0"
