"""Certification toolkit for the entropic union-closed sets bound.

Thin package wrapper around the compiled extension: analytic constants,
coupling kernels, PSD verifications (grid and exact-rational series), the
9-dimensional mixture optimization, and the maximal-correlation scan.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
