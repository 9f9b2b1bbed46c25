"""Generalized difference sequence spaces built from the triple band matrix
B(r, s, t) and a Lambda-mean, with numerical membership tests, bases, duals
and matrix-class conditions."""

__version__ = "0.1.0"

from .core import *  # noqa: F401,F403
from .triangles import *  # noqa: F401,F403
from .transform import *  # noqa: F401,F403
from .spaces import *  # noqa: F401,F403
from .basis import *  # noqa: F401,F403
from .duals import *  # noqa: F401,F403
from .matclass import *  # noqa: F401,F403
from .expr import compile_expr  # noqa: F401
