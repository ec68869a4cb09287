"""Exact-arithmetic semi-direct products and splittings of simplicial vector
bundles over finite groupoids, with the surrounding Dold-Kan machinery.

Everything computes over Q with arbitrary-precision rationals; every identity
the library claims is checked by exact equality, never by tolerance.
"""

from . import doldkan, exactla, graded, groupoid, ordmaps, ruth, sdp, simplicial, split, svb

__all__ = [
    "doldkan",
    "exactla",
    "graded",
    "groupoid",
    "ordmaps",
    "ruth",
    "sdp",
    "simplicial",
    "split",
    "svb",
]
