"""Numerical companion to the groupoid quantization of the standard Podles sphere.

Modules: ``special`` (dilogarithm and weighted quadrature), ``groupoid``
(convolution algebras of O1 and G_S), ``sphere`` (the Podles generators),
``geometry`` (the symplectic groupoid over S^2), ``polarization`` (leaves,
sections and the bridge to the algebra) and ``cli``.
"""

from .groupoid import GS, INF, O1, AlgebraElement
from .special import QuadratureError, QuadratureSpec, dilog

__all__ = ["GS", "INF", "O1", "AlgebraElement", "QuadratureError", "QuadratureSpec", "dilog"]
__version__ = "0.1.0"
