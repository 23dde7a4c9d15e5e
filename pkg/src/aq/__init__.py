"""Andre-Quillen homology and cohomology of algebras over finitely
presented algebraic theories, with exact-arithmetic brute-force oracles.
"""

from .abgroups import FGAbelianGroup, FinAb
from .presented import Presentation, Subquotient, homology_of_complex
from .snf import smith_normal_form

__all__ = [
    "FGAbelianGroup",
    "FinAb",
    "Presentation",
    "Subquotient",
    "homology_of_complex",
    "smith_normal_form",
]
