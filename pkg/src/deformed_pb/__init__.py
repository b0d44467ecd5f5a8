"""Deformed exponential matrix calculus and generalized Peierls-Bogolyubov checks."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .entropy import *  # noqa: F401,F403
from .entropy import __all__ as _entropy_all
from .ensembles import *  # noqa: F401,F403
from .ensembles import __all__ as _ensembles_all
from .frechet import *  # noqa: F401,F403
from .frechet import __all__ as _frechet_all
from .functionals import *  # noqa: F401,F403
from .functionals import __all__ as _functionals_all
from .quadrature import *  # noqa: F401,F403
from .quadrature import __all__ as _quadrature_all

__version__ = "0.1.0"

__all__ = [
    *_core_all,
    *_quadrature_all,
    *_frechet_all,
    *_ensembles_all,
    *_functionals_all,
    *_entropy_all,
]
